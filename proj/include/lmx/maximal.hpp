#pragma once

#include <vector>

#include "lmx/lorentz.hpp"
#include "lmx/space.hpp"

namespace lmx {

struct MaximalResult {
  CellFunction mf;
  /// Smallest radius attaining the maximum, per cell.
  std::vector<double> argmax_radius;
  /// True where the radius-0 ball (f itself) attains the maximum.
  std::vector<bool> attained_by_f;
};

/// Centered maximal function: per cell, the largest average over the closed
/// balls at the distinct distances from that cell (radius 0 included).
MaximalResult maximal_function(const FiniteSpace& space, const CellFunction& f);

struct Decomposition {
  CellFunction local;      // maximal function within each component
  ExtReal global;          // ||F||_1 / mu(X)
  CellFunction combined;   // maximal function of the whole space
  double max_rel_dev = 0;  // max_x |M F(x) / max(local, global) - 1|
  bool holds = false;      // max_rel_dev <= 1e-12
};

/// Splits the maximal function of a combined space into its local and global parts.
Decomposition prop1_decompose(const FiniteSpace& combined, const CellFunction& f);

/// Pointwise upper bound for the maximal function built from the structure of
/// a generated test space. Throws UnknownKind for other spaces.
CellFunction certificate_majorant(const FiniteSpace& space, const CellFunction& f);

}  // namespace lmx
