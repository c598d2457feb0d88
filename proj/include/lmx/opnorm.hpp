#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lmx/lorentz.hpp"
#include "lmx/space.hpp"

namespace lmx {

/// A function together with the space it lives on (which may be a refinement
/// of the space being measured, for split indicators) and its ratio.
struct Witness {
  FiniteSpace space;
  CellFunction f;
  ExtReal ratio;
  std::string method;  // "subset", "split", "builtin", "search"
  std::string label;   // human-readable description of f
};

struct ConstantEstimate {
  AdmissibleTriple triple;
  ExtReal lower;                  // best ratio found
  Witness best;
  bool exact = false;             // the enumerated family was exhaustive
  std::uint64_t evaluations = 0;  // ratios computed
};

/// ||M f||_{p,r} / ||f||_{p,q}. Throws ZeroFunction for f = 0.
ExtReal witness_ratio(const FiniteSpace& space, const CellFunction& f, const AdmissibleTriple& triple);

/// Recomputes the stored witness ratio from scratch.
ExtReal recheck(const Witness& w, const AdmissibleTriple& triple);

/// Largest ratio over indicators chi_E at (p, 1, r). Dense spaces: every
/// nonempty subset. Cellular spaces: every choice of how many points to take
/// from each interchangeable cell, whole cells otherwise, and for layered
/// block spaces every union of cells plus the single-level sets cut by a
/// split on a grid of positions. Ties within relative 1e-12 keep the first
/// candidate in enumeration order. Throws BudgetExceeded when the family has
/// more than `subset_budget` members.
ConstantEstimate restricted_constant_exact(const FiniteSpace& space, double p, double r,
                                           std::uint64_t subset_budget);

/// Same ratio restricted to indicators of single cells and, for layered block
/// spaces, initial segments of one lower level on the split grid.
ConstantEstimate restricted_single_level(const FiniteSpace& space, double p, double r);

/// Split positions tried for a level of `count` points: all of 1..count-1
/// when count <= 64, otherwise powers of two from both ends plus the middle.
std::vector<BigInt> split_grid(const BigInt& count);

/// Built-in witnesses for generated spaces (chi_{x_0}, sum 1/m_i chi_{T_i}),
/// plus chi_X and single-cell indicators.
std::vector<Witness> builtin_witnesses(const FiniteSpace& space, const AdmissibleTriple& triple);

/// Coordinate ascent over cell-constant functions in log-value space,
/// seeded restarts, starting from the best built-in. `budget` bounds the
/// number of ratio evaluations beyond the built-ins.
ConstantEstimate search_constant(const FiniteSpace& space, const AdmissibleTriple& triple,
                                 std::uint64_t budget, std::uint64_t seed);

enum class LemmaKind { L1, L2 };

/// L1: (sum_j 2^{j r (1/p - 1)} m_j^{r/p})^{1/r}, sup form for r = inf.
/// L2: (sum_{j < l} m'_j^{-r})^{1/r}, 1 for r = inf (0 for l = 1).
ExtReal lemma_formula(LemmaKind kind, const std::vector<BigInt>& params, double p, double r);

struct TrendPoint {
  double parameter = 0;
  ExtReal estimate;
  ExtReal formula;
};

struct TrendRow {
  double parameter = 0;
  ExtReal estimate;
  ExtReal formula;
  double ratio = 0;  // estimate / formula
};

struct TrendReport {
  std::vector<TrendRow> rows;
  double slope = 0;  // least squares of log estimate against log formula
  double band = 0;   // max ratio / min ratio
};

/// Needs >= 3 positive points and a formula that is not constant
/// (DegenerateSweep otherwise).
TrendReport trend_fit(const std::vector<TrendPoint>& points);

}  // namespace lmx
