#include "lmx/sequences.hpp"

#include <cmath>

namespace lmx {

namespace {

constexpr long double kGuard = 0x1p-30L;
constexpr double kBitBudget = 2.0e7;  // largest exact product we are willing to form

// Smallest common denominator d <= 64 making every exponent an integer.
int common_denominator(const std::vector<Power>& a, const std::vector<Power>& b) {
  for (int d = 1; d <= 64; ++d) {
    bool ok = true;
    for (const auto* side : {&a, &b}) {
      for (const auto& t : *side) {
        const double x = t.exponent * d;
        if (!std::isfinite(x) || std::fabs(x - std::round(x)) > 1e-9) ok = false;
      }
    }
    if (ok) return d;
  }
  return 0;
}

Status sign_status(int sign, Status on_equal) {
  if (sign > 0) return Status::Holds;
  if (sign < 0) return Status::Fails;
  return on_equal;
}

// ceil(2^lg) for a real lg, exact in the leading 64 bits.
BigInt ceil_exp2(long double lg) {
  if (lg < 62) {
    const long double v = std::exp2(lg);
    return BigInt(static_cast<unsigned long long>(std::ceil(v - v * 1e-18L)));
  }
  return ExtReal::from_log2(lg).ceil_int();
}

void require(bool ok, Thm1Case which, const std::string& why) {
  if (!ok) throw Error(ErrorCode::BadCase, std::string(to_string(which)) + ": " + why);
}

// Case 1 sequence ā for a_i = 2^{i(p0-1)} i^{-p0/r0} / damp, with damp >= 1
// a real factor; exact integer arithmetic when damp == 1.
Thm1Sequence case1(Thm1Case which, double p0, double r0, int n, long double log2_damp) {
  Thm1Sequence out;
  out.which = which;
  out.r_member = r0;
  const double k = p0 / r0;
  const bool exact = log2_damp == 0.0L;
  auto log2_a = [&](long long i) {
    return static_cast<long double>(i) * (p0 - 1) - k * std::log2(static_cast<long double>(i)) - log2_damp;
  };
  auto at_least_one = [&](long long i) -> bool {
    if (exact) {
      return powers_ge({{BigInt(2), static_cast<double>(i) * (p0 - 1)}}, {{BigInt(i), k}}) == Status::Holds;
    }
    return log2_a(i) >= 0;
  };
  // a_{i+1} >= a_i  <=>  2^{p0-1} i^{k} >= (i+1)^{k}; the ratio grows with i.
  auto rising = [&](long long i) {
    return powers_ge({{BigInt(2), p0 - 1}, {BigInt(i), k}}, {{BigInt(i + 1), k}}) == Status::Holds;
  };
  long long i0 = 0;
  while (i0 < n && !(at_least_one(i0 + 1) && rising(i0 + 1))) ++i0;
  out.i0 = static_cast<std::size_t>(i0);
  for (long long i = 1; i <= n; ++i) {
    if (i <= i0) {
      out.values.emplace_back(1);
    } else if (exact) {
      out.values.push_back(ceil_quotient({{BigInt(2), static_cast<double>(i) * (p0 - 1)}}, {{BigInt(i), k}}));
    } else {
      out.values.push_back(ceil_exp2(log2_a(i)));
    }
  }
  return out;
}

// floor(i^{1/r}) as an exact integer.
BigInt floor_root(long long i, double r) {
  auto too_big = [&](const BigInt& c) { return powers_gt({{c + 1, r}}, {{BigInt(i), 1.0}}); };
  return smallest_holding(BigInt(1), too_big);
}

}  // namespace

BigInt integer_root(const BigInt& n, unsigned d) {
  if (n < 0 || d == 0) throw Error(ErrorCode::BadParams, "integer_root needs n >= 0, d >= 1");
  if (n < 2 || d == 1) return n;
  const unsigned bits = boost::multiprecision::msb(n) + 1;
  BigInt x = BigInt(1) << ((bits + d - 1) / d);  // >= the root
  while (true) {
    const BigInt y = ((d - 1) * x + n / boost::multiprecision::pow(x, d - 1)) / d;
    if (y >= x) break;
    x = y;
  }
  while (boost::multiprecision::pow(x, d) > n) --x;
  while (boost::multiprecision::pow(x + 1, d) <= n) ++x;
  return x;
}

BigInt ceil_quotient(const std::vector<Power>& rhs, const std::vector<Power>& lhs) {
  std::vector<Power> all = rhs;
  all.insert(all.end(), lhs.begin(), lhs.end());
  const int d = common_denominator(all, {});
  double bits = 0;
  for (const auto& t : all) bits += std::fabs(t.exponent * d) * (boost::multiprecision::msb(t.base) + 1);
  if (d > 0 && bits <= kBitBudget) {
    // c^d * D >= N with N, D integers.
    BigInt N = 1, D = 1;
    auto put = [&](const Power& t, bool on_rhs) {
      const long long e = std::llround(t.exponent * d);
      if (e == 0) return;
      BigInt v = boost::multiprecision::pow(t.base, static_cast<unsigned>(std::llabs(e)));
      if ((e > 0) == on_rhs) N *= v;
      else D *= v;
    };
    for (const auto& t : rhs) put(t, true);
    for (const auto& t : lhs) put(t, false);
    BigInt q = N / D;
    BigInt c = integer_root(q, static_cast<unsigned>(d));
    if (boost::multiprecision::pow(c, static_cast<unsigned>(d)) * D < N) ++c;
    return c < 1 ? BigInt(1) : c;
  }
  long double lg = 0;
  for (const auto& t : rhs) lg += t.exponent * log2_big(t.base);
  for (const auto& t : lhs) lg -= t.exponent * log2_big(t.base);
  BigInt c = ceil_exp2(lg + std::log2(1.0L + 0x1p-29L));
  if (c < 1) c = 1;
  std::vector<Power> left = lhs;
  left.push_back(Power{c, 1.0});
  for (int guard = 0; powers_ge(left, rhs) != Status::Holds; ++guard) {
    if (guard > 64) throw Error(ErrorCode::Infeasible, "could not confirm a ceiling outside the guard band");
    c += std::max(BigInt(1), BigInt(c >> 28));
    left.back().base = c;
  }
  return c;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Holds: return "holds";
    case Status::Fails: return "fails";
    case Status::Fragile: return "fragile";
  }
  return "fails";
}

long double log2_big(const BigInt& n) {
  if (n <= 0) throw Error(ErrorCode::BadParams, "log2 of a nonpositive integer");
  const unsigned bits = boost::multiprecision::msb(n);
  if (bits < 63) return std::log2(static_cast<long double>(n.convert_to<unsigned long long>()));
  const unsigned shift = bits - 62;
  const BigInt top = n >> shift;
  return static_cast<long double>(shift) + std::log2(static_cast<long double>(top.convert_to<unsigned long long>()));
}

Status compare_powers(const std::vector<Power>& lhs, const std::vector<Power>& rhs, Status on_equal) {
  for (const auto* side : {&lhs, &rhs}) {
    for (const auto& t : *side) {
      if (t.base <= 0) throw Error(ErrorCode::BadParams, "power base must be positive");
    }
  }
  const int d = common_denominator(lhs, rhs);
  if (d > 0) {
    double bits = 0;
    for (const auto* side : {&lhs, &rhs}) {
      for (const auto& t : *side) bits += std::fabs(t.exponent * d) * (boost::multiprecision::msb(t.base) + 1);
    }
    if (bits <= kBitBudget) {
      BigInt num = 1, den = 1;
      auto put = [&](const Power& t, bool left) {
        const long long e = std::llround(t.exponent * d);
        if (e == 0) return;
        BigInt v = boost::multiprecision::pow(t.base, static_cast<unsigned>(std::llabs(e)));
        if ((e > 0) == left) num *= v;
        else den *= v;
      };
      for (const auto& t : lhs) put(t, true);
      for (const auto& t : rhs) put(t, false);
      return sign_status(num > den ? 1 : (num < den ? -1 : 0), on_equal);
    }
  }
  long double diff = 0;
  for (const auto& t : lhs) diff += t.exponent * log2_big(t.base);
  for (const auto& t : rhs) diff -= t.exponent * log2_big(t.base);
  if (std::fabs(diff) < kGuard) return Status::Fragile;
  return diff > 0 ? Status::Holds : Status::Fails;
}

Status powers_ge(const std::vector<Power>& lhs, const std::vector<Power>& rhs) {
  return compare_powers(lhs, rhs, Status::Holds);
}

Status powers_gt(const std::vector<Power>& lhs, const std::vector<Power>& rhs) {
  return compare_powers(lhs, rhs, Status::Fails);
}

std::string_view to_string(Thm1Case c) {
  switch (c) {
    case Thm1Case::U1: return "U1";
    case Thm1Case::V1: return "V1";
    case Thm1Case::U2: return "U2";
    case Thm1Case::V2: return "V2";
    case Thm1Case::U3: return "U3";
    case Thm1Case::V3: return "V3";
    case Thm1Case::U4: return "U4";
    case Thm1Case::V4: return "V4";
  }
  return "U1";
}

Thm1Case thm1_case_from_string(std::string_view name) {
  for (auto c : {Thm1Case::U1, Thm1Case::V1, Thm1Case::U2, Thm1Case::V2, Thm1Case::U3, Thm1Case::V3,
                 Thm1Case::U4, Thm1Case::V4}) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::BadCase, "unknown case '" + std::string(name) + "'");
}

Thm1Sequence thm1_sequences(Thm1Case which, double p0, double q0, double r0, int n) {
  if (n < 1) throw Error(ErrorCode::BadParams, "sequence length must be positive");
  const bool p_gt1 = p0 > 1 && std::isfinite(p0);
  const bool p_is1 = p0 == 1 && q0 == 1;
  const bool r_fin = std::isfinite(r0) && r0 >= 1;
  require(q0 >= 1 && q0 <= r0, which, "need 1 <= q0 <= r0");
  Thm1Sequence out;
  switch (which) {
    case Thm1Case::U1:
      require(p_gt1 && r_fin, which, "needs p0 in (1,inf) and finite r0");
      out = case1(which, p0, r0, n, 0.0L);
      break;
    case Thm1Case::V1: {
      require(p_gt1 && r_fin, which, "needs p0 in (1,inf) and finite r0");
      const long double damp = (p0 / r0) * std::log2(std::log(static_cast<long double>(n) + 3));
      out = case1(which, p0, r0, n, damp);
      break;
    }
    case Thm1Case::U2:
      require(p_gt1 && !r_fin, which, "needs p0 in (1,inf) and r0 = inf");
      out.which = which;
      out.r_member = r0;
      for (long long i = 1; i <= n; ++i) {
        out.values.push_back(ceil_quotient({{BigInt(i), p0}, {BigInt(2), static_cast<double>(i) * (p0 - 1)}}, {}));
      }
      break;
    case Thm1Case::V2:
      require(p_gt1 && !r_fin, which, "needs p0 in (1,inf) and r0 = inf");
      out = case1(which, p0, static_cast<double>(n), n, 0.0L);
      break;
    case Thm1Case::U3:
      require(p_is1 && r_fin, which, "needs p0 = q0 = 1 and finite r0");
      out.which = which;
      out.target = GeneratorKind::FirstTypePrime;
      out.r_member = r0;
      for (long long i = 1; i <= n; ++i) out.values.push_back(floor_root(i, r0));
      break;
    case Thm1Case::V3: {
      require(p_is1 && r_fin, which, "needs p0 = q0 = 1 and finite r0");
      out.which = which;
      out.target = GeneratorKind::FirstTypePrime;
      out.r_member = r0;
      const long double lg = std::log(static_cast<long double>(n) + 3);
      for (long long i = 1; i <= n; ++i) {
        const long double v = std::pow(static_cast<long double>(i) * lg, 1.0L / r0);
        out.values.emplace_back(i == 1 ? 1ULL : static_cast<unsigned long long>(std::floor(v)));
      }
      break;
    }
    case Thm1Case::U4:
      require(p_is1 && !r_fin, which, "needs p0 = q0 = 1 and r0 = inf");
      out.which = which;
      out.r_member = r0;
      for (long long i = 1; i <= n; ++i) out.values.emplace_back(i);
      break;
    case Thm1Case::V4:
      require(p_is1 && !r_fin, which, "needs p0 = q0 = 1 and r0 = inf");
      out.which = which;
      out.target = GeneratorKind::FirstTypePrime;
      out.r_member = n;
      for (long long i = 1; i <= n; ++i) out.values.push_back(floor_root(i, static_cast<double>(n)));
      break;
  }
  out.which = which;
  return out;
}

}  // namespace lmx
