#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lmx/ext_real.hpp"
#include "lmx/space.hpp"

namespace lmx {

/// Outcome of comparing a quantity against a threshold.
enum class Status { Holds, Fails, Fragile };

std::string_view to_string(Status s);

/// base^exponent with a positive integer base.
struct Power {
  BigInt base;
  double exponent;
};

/// Sign of log(prod lhs) - log(prod rhs). Exact when all exponents are
/// rationals with a small common denominator; otherwise evaluated in log2
/// with a 2^-30 relative guard band, inside which the result is Fragile.
/// Returns Holds for >, Fails for <, and for equality returns `on_equal`.
Status compare_powers(const std::vector<Power>& lhs, const std::vector<Power>& rhs, Status on_equal);

/// Convenience forms: lhs >= rhs and lhs > rhs.
Status powers_ge(const std::vector<Power>& lhs, const std::vector<Power>& rhs);
Status powers_gt(const std::vector<Power>& lhs, const std::vector<Power>& rhs);

/// log2 of a positive integer.
long double log2_big(const BigInt& n);

/// Smallest x >= lo with pred(x) == Holds, for a predicate that is monotone
/// (Fails below some point, Holds above it). Fragile counts as not holding.
/// Throws Infeasible after `max_doublings` galloping steps.
template <typename Pred>
BigInt smallest_holding(BigInt lo, Pred pred, int max_doublings = 100000) {
  if (pred(lo) == Status::Holds) return lo;
  BigInt step = 1;
  BigInt bad = lo;
  BigInt hi = lo + step;
  int rounds = 0;
  while (pred(hi) != Status::Holds) {
    if (++rounds > max_doublings) throw Error(ErrorCode::Infeasible, "search bound exhausted");
    bad = hi;
    step *= 2;
    hi = lo + step;
  }
  while (hi - bad > 1) {
    BigInt mid = (hi + bad) / 2;
    if (pred(mid) == Status::Holds) hi = mid;
    else bad = mid;
  }
  return hi;
}

/// Smallest positive integer c with c * prod(lhs) >= prod(rhs). Exact for
/// rational exponents (integer roots); otherwise taken from the log2 value
/// raised by a relative 2^-29 margin and confirmed outside the guard band.
BigInt ceil_quotient(const std::vector<Power>& rhs, const std::vector<Power>& lhs);

/// floor(n^(1/d)) for n >= 0, d >= 1.
BigInt integer_root(const BigInt& n, unsigned d);

enum class Thm1Case { U1, V1, U2, V2, U3, V3, U4, V4 };

std::string_view to_string(Thm1Case c);
Thm1Case thm1_case_from_string(std::string_view name);

struct Thm1Sequence {
  Thm1Case which = Thm1Case::U1;
  std::vector<BigInt> values;  // length n
  /// Number of leading entries forced to 1 (cases 1 and 2 only).
  std::size_t i0 = 0;
  /// Generator the sequence feeds: FirstType (m) or FirstTypePrime (m').
  GeneratorKind target = GeneratorKind::FirstType;
  /// Exponent r of the member actually built (differs from r0 in V2 / V4).
  double r_member = 0;
};

/// Sequences of the four divergence constructions. U cases return the
/// length-n prefix of a fixed sequence; V cases return the n-th member of
/// the damped or diagonal family. Logarithms are natural.
Thm1Sequence thm1_sequences(Thm1Case which, double p0, double q0, double r0, int n);

}  // namespace lmx
