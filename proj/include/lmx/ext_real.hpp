#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lmx {

using BigInt = boost::multiprecision::cpp_int;

/// Nonnegative real number with a 64-bit binary exponent.
///
/// The value is mant * 2^exp with mant in [1,2), or exactly zero. Products,
/// quotients and powers never overflow for the magnitudes produced by the
/// test-space generators (measures like 2^(2^15) are routine).
class ExtReal {
 public:
  constexpr ExtReal() = default;
  explicit ExtReal(double x);

  static ExtReal zero() { return ExtReal(); }
  static ExtReal one() { return ExtReal(1.0); }
  static ExtReal from_log2(long double lg);
  static ExtReal from_int(const BigInt& n);
  static ExtReal from_int(std::int64_t n) { return from_int(BigInt(n)); }
  static ExtReal pow2(std::int64_t e);

  bool is_zero() const { return mant_ == 0.0; }
  double mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }

  /// log2 of the value; -inf for zero.
  long double log2() const;
  /// Nearest double; saturates to inf / flushes to 0 outside double range.
  double to_double() const;
  long double to_long_double() const;

  /// floor / ceil as an exact integer (exact in the 53 mantissa bits).
  BigInt floor_int() const;
  BigInt ceil_int() const;

  ExtReal& operator*=(const ExtReal& o);
  ExtReal& operator/=(const ExtReal& o);
  ExtReal& operator+=(const ExtReal& o);

  friend ExtReal operator*(ExtReal a, const ExtReal& b) { return a *= b; }
  friend ExtReal operator/(ExtReal a, const ExtReal& b) { return a /= b; }
  friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }
  /// Requires a >= b; the result is clamped at zero otherwise.
  friend ExtReal operator-(const ExtReal& a, const ExtReal& b);

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.mant_ == b.mant_ && (a.mant_ == 0.0 || a.exp_ == b.exp_);
  }
  friend bool operator<(const ExtReal& a, const ExtReal& b);
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend bool operator>=(const ExtReal& a, const ExtReal& b) { return !(a < b); }

  /// x^a for real a; 0^a = 0 for a > 0 and 1 for a == 0.
  ExtReal pow(long double a) const;
  ExtReal scaled_pow2(std::int64_t e) const;

  /// |a/b - 1|, with 0/0 treated as agreement.
  static double rel_diff(const ExtReal& a, const ExtReal& b);

  std::string str() const;

 private:
  ExtReal(double mant, std::int64_t exp) : mant_(mant), exp_(exp) {}
  static ExtReal normalized(long double m, std::int64_t e);

  double mant_ = 0.0;
  std::int64_t exp_ = 0;
};

std::ostream& operator<<(std::ostream& os, const ExtReal& x);

inline ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }
inline ExtReal min(const ExtReal& a, const ExtReal& b) { return a < b ? a : b; }

/// Sum of nonnegative terms accumulated largest-first (fixed order, so the
/// result does not depend on the order of the input).
ExtReal sum_largest_first(std::vector<ExtReal> terms);

/// a^q - b^q for a >= b >= 0 without cancellation in the leading digits.
ExtReal pow_diff(const ExtReal& a, const ExtReal& b, long double q);

}  // namespace lmx
