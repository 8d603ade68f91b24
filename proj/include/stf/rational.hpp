#pragma once

// Exact rational arithmetic and the exact-or-float scalar used for kernel values.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <boost/multiprecision/gmp.hpp>

namespace stf {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Bad input from a caller or a config file.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured enumeration or refinement cap was hit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well formed but outside what the library supports.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "p/q", "-3", "0.25" or "1e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Exact conversion through the shortest decimal rendering of `x`, so 0.1 becomes 1/10.
Rational rational_from_double(double x);

/// "p/q", or "p" when the denominator is one.
std::string format_rational(const Rational& x);

double to_double(const Rational& x);

Rational pow_int(const Rational& base, long exponent);

/// Exact n-th root of a non-negative rational when it is a perfect power.
std::optional<Rational> exact_root(const Rational& x, unsigned long n);

/// Small rational exponent p/q with q > 0.
struct Exponent {
  long num = 1;
  long den = 1;
};

/// Exact x^(p/q) for x >= 0, or nullopt when the result is irrational.
std::optional<Rational> exact_pow(const Rational& x, Exponent e);

/// The stable index alpha, kept both as a double and, when it is a short
/// fraction, as an exact exponent so that powers can stay rational.
class Alpha {
 public:
  Alpha() = default;
  explicit Alpha(double value);
  explicit Alpha(const Rational& value);

  double value() const { return value_; }
  const std::optional<Exponent>& ratio() const { return ratio_; }
  /// alpha itself as an exponent, if exact.
  std::optional<Exponent> exponent() const { return ratio_; }
  /// 1/alpha as an exponent, if exact.
  std::optional<Exponent> inverse_exponent() const;

 private:
  double value_ = 1.0;
  std::optional<Exponent> ratio_;
};

/// A real number that stays an exact rational for as long as the arithmetic allows.
class Scalar {
 public:
  Scalar() : v_(Rational(0)) {}
  Scalar(const Rational& r) : v_(r) {}  // NOLINT(google-explicit-constructor)
  Scalar(int i) : v_(Rational(i)) {}    // NOLINT(google-explicit-constructor)
  static Scalar real(double d) { return Scalar(d, 0); }

  bool is_exact() const { return std::holds_alternative<Rational>(v_); }
  const Rational& exact() const { return std::get<Rational>(v_); }
  double to_double() const;

  Scalar abs() const;
  bool is_zero() const;
  int sign() const;

  /// |this|^(1) raised to the exponent, exact where a rational result exists.
  Scalar pow(Exponent e, double approx_exponent) const;
  /// |this|^alpha.
  Scalar abs_pow(const Alpha& alpha) const;
  /// |this|^(1/alpha).
  Scalar abs_root(const Alpha& alpha) const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }

  /// Exact when both sides are exact; double comparison otherwise.
  friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b);
  friend bool operator==(const Scalar& a, const Scalar& b);

  std::string to_string() const;

 private:
  Scalar(double d, int) : v_(d) {}
  std::variant<Rational, double> v_;
};

}  // namespace stf
