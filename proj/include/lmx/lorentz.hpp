#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lmx/ext_real.hpp"
#include "lmx/space.hpp"

namespace lmx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Nonnegative function constant on each cell, indexed like space.cells().
struct CellFunction {
  std::vector<ExtReal> values;

  static CellFunction constant(const FiniteSpace& space, const ExtReal& c);
  /// Indicator of the listed cells.
  static CellFunction indicator(const FiniteSpace& space, const std::vector<std::string>& ids);
  /// Every cell of the space must appear; unknown ids are rejected.
  static CellFunction from_map(const FiniteSpace& space, const std::map<std::string, ExtReal>& values);
  std::map<std::string, ExtReal> to_map(const FiniteSpace& space) const;
};

struct Level {
  ExtReal value;
  ExtReal mass;
};

/// Levels sorted by strictly decreasing positive value.
struct DistributionProfile {
  std::vector<Level> levels;

  /// Cumulative masses W_i.
  std::vector<ExtReal> cumulative() const;
  /// mu{f > t}.
  ExtReal distribution(const ExtReal& t) const;
  /// Decreasing rearrangement at t >= 0.
  ExtReal rearrangement(const ExtReal& t) const;
};

struct AdmissibleTriple {
  double p = 1.0;
  double q = 1.0;
  double r = 1.0;

  /// Throws BadTriple unless p = q = 1 or 1 < p < inf with 1 <= q <= r <= inf.
  void check() const;
  std::string str() const;
};

DistributionProfile distribution_profile(const FiniteSpace& space, const CellFunction& f);

/// ||f||_{p,q}; q may be kInf.
ExtReal lorentz_norm(const DistributionProfile& profile, double p, double q);
ExtReal lorentz_norm(const FiniteSpace& space, const CellFunction& f, double p, double q);

/// Both closed forms of ||f||_{p,q} for q < inf: (distribution-function form, rearrangement form).
std::pair<ExtReal, ExtReal> lorentz_norm_forms(const DistributionProfile& profile, double p, double q);

ExtReal l1_norm(const DistributionProfile& profile);
ExtReal l1_norm(const FiniteSpace& space, const CellFunction& f);

}  // namespace lmx
