#include "lmx/ext_real.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "lmx/error.hpp"

namespace lmx {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::IllegalSplit: return "IllegalSplit";
    case ErrorCode::NonIntegerSplit: return "NonIntegerSplit";
    case ErrorCode::BadSequence: return "BadSequence";
    case ErrorCode::UncertifiedPlan: return "UncertifiedPlan";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::BadCase: return "BadCase";
    case ErrorCode::NotCombined: return "NotCombined";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::DegenerateSweep: return "DegenerateSweep";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::DegenerateComponent: return "DegenerateComponent";
    case ErrorCode::BadTriple: return "BadTriple";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

ExtReal ExtReal::normalized(long double m, std::int64_t e) {
  if (!(m > 0.0L)) return ExtReal();
  int k = 0;
  long double f = std::frexp(m, &k);  // f in [0.5, 1)
  double mant = static_cast<double>(f * 2.0L);
  std::int64_t exp = e + k - 1;
  if (mant >= 2.0) {  // rounding to double can carry into the next binade
    mant *= 0.5;
    ++exp;
  }
  return ExtReal(mant, exp);
}

ExtReal::ExtReal(double x) {
  if (x < 0.0 || std::isnan(x) || std::isinf(x)) {
    throw Error(ErrorCode::BadParams, "ExtReal requires a finite nonnegative value");
  }
  *this = normalized(x, 0);
}

ExtReal ExtReal::from_log2(long double lg) {
  if (std::isinf(lg) && lg < 0) return ExtReal();
  long double e = std::floor(lg);
  long double frac = lg - e;
  return normalized(std::exp2(frac), static_cast<std::int64_t>(e));
}

ExtReal ExtReal::from_int(const BigInt& n) {
  if (n < 0) throw Error(ErrorCode::BadParams, "negative integer");
  if (n == 0) return ExtReal();
  const std::int64_t bits = static_cast<std::int64_t>(boost::multiprecision::msb(n));
  if (bits <= 62) {
    return normalized(static_cast<long double>(n.convert_to<std::uint64_t>()), 0);
  }
  const std::int64_t shift = bits - 62;
  BigInt top = n >> static_cast<unsigned>(shift);
  return normalized(static_cast<long double>(top.convert_to<std::uint64_t>()), shift);
}

ExtReal ExtReal::pow2(std::int64_t e) { return ExtReal(1.0, e); }

long double ExtReal::log2() const {
  if (is_zero()) return -std::numeric_limits<long double>::infinity();
  return static_cast<long double>(exp_) + std::log2(static_cast<long double>(mant_));
}

double ExtReal::to_double() const {
  if (is_zero()) return 0.0;
  if (exp_ > 1100) return std::numeric_limits<double>::infinity();
  if (exp_ < -1100) return 0.0;
  return std::ldexp(mant_, static_cast<int>(exp_));
}

long double ExtReal::to_long_double() const {
  if (is_zero()) return 0.0L;
  if (exp_ > 16000) return std::numeric_limits<long double>::infinity();
  if (exp_ < -16000) return 0.0L;
  return std::ldexp(static_cast<long double>(mant_), static_cast<int>(exp_));
}

BigInt ExtReal::floor_int() const {
  if (is_zero() || exp_ < 0) return BigInt(0);
  if (exp_ < 52) return BigInt(static_cast<std::uint64_t>(std::floor(std::ldexp(mant_, static_cast<int>(exp_)))));
  BigInt m(static_cast<std::uint64_t>(std::ldexp(mant_, 52)));
  return m << static_cast<unsigned>(exp_ - 52);
}

BigInt ExtReal::ceil_int() const {
  if (is_zero()) return BigInt(0);
  if (exp_ < 0) return BigInt(1);
  if (exp_ < 52) return BigInt(static_cast<std::uint64_t>(std::ceil(std::ldexp(mant_, static_cast<int>(exp_)))));
  return floor_int();
}

ExtReal& ExtReal::operator*=(const ExtReal& o) {
  if (is_zero() || o.is_zero()) {
    *this = ExtReal();
    return *this;
  }
  *this = normalized(static_cast<long double>(mant_) * o.mant_, exp_ + o.exp_);
  return *this;
}

ExtReal& ExtReal::operator/=(const ExtReal& o) {
  if (o.is_zero()) throw Error(ErrorCode::BadParams, "ExtReal division by zero");
  if (is_zero()) return *this;
  *this = normalized(static_cast<long double>(mant_) / o.mant_, exp_ - o.exp_);
  return *this;
}

ExtReal& ExtReal::operator+=(const ExtReal& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) {
    *this = o;
    return *this;
  }
  const ExtReal& big = (exp_ >= o.exp_) ? *this : o;
  const ExtReal& small = (exp_ >= o.exp_) ? o : *this;
  const std::int64_t d = big.exp_ - small.exp_;
  if (d > 80) {
    *this = big;
    return *this;
  }
  long double m = static_cast<long double>(big.mant_) +
                  std::ldexp(static_cast<long double>(small.mant_), -static_cast<int>(d));
  *this = normalized(m, big.exp_);
  return *this;
}

ExtReal operator-(const ExtReal& a, const ExtReal& b) {
  if (b.is_zero()) return a;
  if (!(b < a)) return ExtReal();
  const std::int64_t d = a.exp_ - b.exp_;
  if (d > 80) return a;
  long double m = static_cast<long double>(a.mant_) -
                  std::ldexp(static_cast<long double>(b.mant_), -static_cast<int>(d));
  return ExtReal::normalized(m, a.exp_);
}

bool operator<(const ExtReal& a, const ExtReal& b) {
  if (a.is_zero()) return !b.is_zero();
  if (b.is_zero()) return false;
  if (a.exp_ != b.exp_) return a.exp_ < b.exp_;
  return a.mant_ < b.mant_;
}

ExtReal ExtReal::pow(long double a) const {
  if (a == 0.0L) return one();
  if (is_zero()) {
    if (a < 0) throw Error(ErrorCode::BadParams, "0 raised to a negative power");
    return ExtReal();
  }
  if (a == 1.0L) return *this;
  // Split a*exp into integer and fractional parts before adding the
  // mantissa contribution, so large exponents keep full precision.
  const long double ae = a * static_cast<long double>(exp_);
  const long double ae_int = std::floor(ae);
  const long double rest = (ae - ae_int) + a * std::log2(static_cast<long double>(mant_));
  const long double rest_int = std::floor(rest);
  return normalized(std::exp2(rest - rest_int),
                    static_cast<std::int64_t>(ae_int) + static_cast<std::int64_t>(rest_int));
}

ExtReal ExtReal::scaled_pow2(std::int64_t e) const {
  if (is_zero()) return *this;
  return ExtReal(mant_, exp_ + e);
}

double ExtReal::rel_diff(const ExtReal& a, const ExtReal& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  if (a.is_zero() || b.is_zero()) return std::numeric_limits<double>::infinity();
  const long double lg = a.log2() - b.log2();
  return static_cast<double>(std::fabs(std::expm1(lg * std::log(2.0L))));
}

std::string ExtReal::str() const {
  if (is_zero()) return "0";
  if (exp_ > -1000 && exp_ < 1000) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", to_double());
    return buf;
  }
  const long double lg10 = log2() * std::log10(2.0L);
  const long double e10 = std::floor(lg10);
  const long double m10 = std::pow(10.0L, lg10 - e10);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15Lfe%+lld", m10, static_cast<long long>(e10));
  return buf;
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) { return os << x.str(); }

ExtReal sum_largest_first(std::vector<ExtReal> terms) {
  std::sort(terms.begin(), terms.end(), [](const ExtReal& a, const ExtReal& b) { return b < a; });
  ExtReal acc;
  for (const auto& t : terms) acc += t;
  return acc;
}

ExtReal pow_diff(const ExtReal& a, const ExtReal& b, long double q) {
  if (b.is_zero()) return a.pow(q);
  if (!(b < a)) return ExtReal();
  const long double ln_ratio = (b.log2() - a.log2()) * std::log(2.0L);
  const long double factor = -std::expm1(q * ln_ratio);
  return a.pow(q) * ExtReal(static_cast<double>(factor));
}

}  // namespace lmx
