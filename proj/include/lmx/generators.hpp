#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lmx/sequences.hpp"
#include "lmx/space.hpp"

namespace lmx {

enum class PlanKind { First, FirstPrime, Second, SecondPrime };

std::string_view to_string(PlanKind kind);
PlanKind plan_kind_from_string(std::string_view name);

struct ConstraintCheck {
  std::string id;       // "(iii) i=2", "(3) j=1", ...
  Status status = Status::Fails;
  std::string witness;  // the compared quantities, for audit
};

/// Integer sequences determining one test space, with a certificate that the
/// defining constraints hold.
struct SequencePlan {
  PlanKind kind = PlanKind::First;
  std::size_t l = 0;
  double p = 0, q = 0, r = 0;  // exponents the plan was built for (second type only)
  std::vector<BigInt> m, h, alpha, beta;
  BigInt alpha_scalar;         // single alpha of the r = inf variant
  std::vector<ConstraintCheck> certificate;

  bool certified() const;
  /// Failing or fragile entries, one per line.
  std::string failures() const;
};

/// Space with x_0 plus levels j = 1..l of m_j points of mass 2^j.
FiniteSpace gen_first_type(const std::vector<BigInt>& m);
SequencePlan plan_first_type(const std::vector<BigInt>& m);

/// Counting-measure space built from m' (m'_1 = 1, non-decreasing) and the
/// minimal increasing exponents h with floor(2^{h_{j+1}} / m'_{j+1}) > 2^{h_j}.
std::pair<FiniteSpace, SequencePlan> gen_first_type_prime(const std::vector<BigInt>& m_prime);

/// Greedy minimal sequences for the layered block space at (p, q, r), r < inf.
SequencePlan synth_second_type(double p, double q, double r, std::size_t l);
FiniteSpace gen_second_type(const SequencePlan& plan);

/// Same construction for r = inf, with one scalar alpha.
SequencePlan synth_second_type_prime(double p, double q, std::size_t l);
FiniteSpace gen_second_type_prime(const SequencePlan& plan);
std::pair<FiniteSpace, SequencePlan> synth_and_gen_second_type_prime(double p, double q, std::size_t l);

/// Recomputes every constraint of the plan from its sequences alone.
std::vector<ConstraintCheck> certify(const SequencePlan& plan);

/// Space for any plan kind.
FiniteSpace gen_from_plan(const SequencePlan& plan);

}  // namespace lmx
