#include "stf/rational.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace stf {

namespace {

BigInt pow10(long e) {
  BigInt r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  long exp10 = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view es = s.substr(epos + 1);
    s = s.substr(0, epos);
    bool eneg = false;
    if (!es.empty() && (es[0] == '+' || es[0] == '-')) {
      eneg = es[0] == '-';
      es.remove_prefix(1);
    }
    if (!all_digits(es) || es.size() > 6) throw UsageError("malformed exponent in number '" + std::string(text) + "'");
    exp10 = std::stol(std::string(es));
    if (eneg) exp10 = -exp10;
  }
  std::string digits;
  long frac = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw UsageError("malformed number '" + std::string(text) + "'");
    digits = std::string(ip) + std::string(fp);
    frac = static_cast<long>(fp.size());
  } else {
    if (!all_digits(s)) throw UsageError("malformed number '" + std::string(text) + "'");
    digits = std::string(s);
  }
  // A leading zero would make the string constructor read octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  BigInt mant(digits.empty() ? std::string("0") : digits);
  long scale = exp10 - frac;
  Rational r = scale >= 0 ? Rational(mant * pow10(scale)) : Rational(mant, pow10(-scale));
  return negative ? Rational(-r) : r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Largest n-th root not exceeding v (v >= 0), or nullopt when v is not a perfect power.
std::optional<BigInt> exact_int_root(const BigInt& v, unsigned long n) {
  BigInt r;
  int exact = mpz_root(r.backend().data(), v.backend().data(), n);
  if (!exact) return std::nullopt;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw UsageError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(trim(s.substr(0, slash)));
    Rational den = parse_decimal(trim(s.substr(slash + 1)));
    if (den == 0) throw UsageError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(s);
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw UsageError("non-finite number cannot be made exact");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return parse_decimal(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

std::string format_rational(const Rational& x) {
  BigInt n = boost::multiprecision::numerator(x);
  BigInt d = boost::multiprecision::denominator(x);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

double to_double(const Rational& x) { return x.convert_to<double>(); }

Rational pow_int(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw UsageError("zero to a negative power");
    return pow_int(Rational(1) / base, -exponent);
  }
  Rational result = 1, b = base;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e) {
    if (e & 1UL) result *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return result;
}

std::optional<Rational> exact_root(const Rational& x, unsigned long n) {
  if (x < 0) throw UsageError("root of a negative rational");
  if (n == 1 || x == 0 || x == 1) return x;
  auto num = exact_int_root(boost::multiprecision::numerator(x), n);
  if (!num) return std::nullopt;
  auto den = exact_int_root(boost::multiprecision::denominator(x), n);
  if (!den) return std::nullopt;
  return Rational(*num, *den);
}

std::optional<Rational> exact_pow(const Rational& x, Exponent e) {
  if (x < 0) throw UsageError("fractional power of a negative rational");
  if (e.num == 0) return Rational(1);
  if (x == 0) {
    if (e.num < 0) throw UsageError("zero to a negative power");
    return Rational(0);
  }
  auto root = exact_root(x, static_cast<unsigned long>(e.den));
  if (!root) return std::nullopt;
  return pow_int(*root, e.num);
}

Alpha::Alpha(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw UsageError("alpha must be positive and finite");
  for (long q = 1; q <= 1000; ++q) {
    double pq = std::round(value * static_cast<double>(q));
    if (std::fabs(value - pq / static_cast<double>(q)) < 1e-12 * std::max(1.0, value)) {
      long p = static_cast<long>(pq);
      long g = std::gcd(p, q);
      ratio_ = Exponent{p / g, q / g};
      break;
    }
  }
}

Alpha::Alpha(const Rational& value) : Alpha(to_double(value)) {
  BigInt d = boost::multiprecision::denominator(value);
  BigInt n = boost::multiprecision::numerator(value);
  if (d <= 1000000 && n <= 1000000) ratio_ = Exponent{n.convert_to<long>(), d.convert_to<long>()};
}

std::optional<Exponent> Alpha::inverse_exponent() const {
  if (!ratio_) return std::nullopt;
  return Exponent{ratio_->den, ratio_->num};
}

double Scalar::to_double() const {
  if (is_exact()) return stf::to_double(exact());
  return std::get<double>(v_);
}

Scalar Scalar::abs() const {
  if (is_exact()) return Scalar(Rational(boost::multiprecision::abs(exact())));
  return real(std::fabs(std::get<double>(v_)));
}

bool Scalar::is_zero() const { return is_exact() ? exact() == 0 : std::get<double>(v_) == 0.0; }

int Scalar::sign() const {
  if (is_exact()) return exact() > 0 ? 1 : (exact() < 0 ? -1 : 0);
  double d = std::get<double>(v_);
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

Scalar Scalar::pow(Exponent e, double approx_exponent) const {
  Scalar a = abs();
  if (a.is_exact()) {
    if (auto r = exact_pow(a.exact(), e)) return Scalar(*r);
  }
  return real(std::pow(a.to_double(), approx_exponent));
}

Scalar Scalar::abs_pow(const Alpha& alpha) const {
  if (auto e = alpha.exponent()) return pow(*e, alpha.value());
  return real(std::pow(abs().to_double(), alpha.value()));
}

Scalar Scalar::abs_root(const Alpha& alpha) const {
  if (auto e = alpha.inverse_exponent()) return pow(*e, 1.0 / alpha.value());
  return real(std::pow(abs().to_double(), 1.0 / alpha.value()));
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.exact() + b.exact()));
  return Scalar::real(a.to_double() + b.to_double());
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.exact() - b.exact()));
  return Scalar::real(a.to_double() - b.to_double());
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.exact() * b.exact()));
  // An exact zero annihilates a float factor exactly.
  if ((a.is_exact() && a.exact() == 0) || (b.is_exact() && b.exact() == 0)) return Scalar(0);
  return Scalar::real(a.to_double() * b.to_double());
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  if (b.is_zero()) throw UsageError("division by zero");
  if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.exact() / b.exact()));
  return Scalar::real(a.to_double() / b.to_double());
}

Scalar Scalar::operator-() const {
  if (is_exact()) return Scalar(Rational(-exact()));
  return real(-std::get<double>(v_));
}

std::partial_ordering operator<=>(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) {
    if (a.exact() < b.exact()) return std::partial_ordering::less;
    if (a.exact() > b.exact()) return std::partial_ordering::greater;
    return std::partial_ordering::equivalent;
  }
  return a.to_double() <=> b.to_double();
}

bool operator==(const Scalar& a, const Scalar& b) { return (a <=> b) == std::partial_ordering::equivalent; }

std::string Scalar::to_string() const {
  if (is_exact()) return format_rational(exact());
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(v_));
  return std::string(buf, res.ptr);
}

}  // namespace stf
