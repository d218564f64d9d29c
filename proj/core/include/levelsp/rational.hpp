#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <string_view>

#include "levelsp/errors.hpp"

namespace levelsp {

/// Exact rational scalar on 64-bit numerator / positive denominator.
///
/// This is the arithmetic backing the exact mode: grid levels, weights and
/// phantom values at desk scale keep tiny denominators, so 64 bits with
/// 128-bit intermediates is ample. Operations that would leave the
/// representable range throw OverflowError instead of wrapping.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long value) : num_(value), den_(1) {}  // NOLINT(implicit)
  Rational(int value) : num_(value), den_(1) {}        // NOLINT(implicit)

  Rational(long long num, long long den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    reduce_from(static_cast<__int128>(num), static_cast<__int128>(den));
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  bool is_integer() const { return den_ == 1; }

  /// Accepts "3", "-3", "2/5" and decimal text such as "0.25" or "1e-3".
  static Rational parse(std::string_view text);

  /// Exact value of the shortest decimal string that round-trips to x.
  /// Used when exact mode must ingest numbers that were written as JSON
  /// decimal literals: "0.3" becomes 3/10, not the binary double.
  static Rational from_double(double x);

  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
      s += '/';
      s += std::to_string(den_);
    }
    return s;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

 private:
  using i128 = __int128;

  static Rational make(i128 num, i128 den) {
    Rational r;
    r.reduce_from(num, den);
    return r;
  }

  void reduce_from(i128 num, i128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const i128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    constexpr i128 kMax = INT64_MAX;
    constexpr i128 kMin = INT64_MIN;
    if (num > kMax || num < kMin || den > kMax) {
      throw OverflowError("rational value exceeds 64-bit range");
    }
    num_ = static_cast<long long>(num);
    den_ = static_cast<long long>(den);
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  long long num_;
  long long den_;
};

inline Rational abs(const Rational& r) {
  return r.num() < 0 ? -r : r;
}

inline Rational Rational::parse(std::string_view text) {
  // trim surrounding spaces
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
    text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty rational literal");

  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const std::string n(text.substr(0, slash));
    const std::string d(text.substr(slash + 1));
    errno = 0;
    char* end = nullptr;
    const long long num = std::strtoll(n.c_str(), &end, 10);
    if (errno != 0 || end == n.c_str() || *end != '\0')
      throw ParseError("bad numerator in '" + std::string(text) + "'");
    errno = 0;
    const long long den = std::strtoll(d.c_str(), &end, 10);
    if (errno != 0 || end == d.c_str() || *end != '\0' || den == 0)
      throw ParseError("bad denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  // decimal or integer literal, optional exponent
  bool negative = false;
  std::string_view t = text;
  if (t.front() == '+' || t.front() == '-') {
    negative = t.front() == '-';
    t.remove_prefix(1);
  }
  long long mantissa = 0;
  long long frac_digits = 0;
  long long exponent = 0;
  bool seen_digit = false;
  size_t i = 0;
  for (; i < t.size() && t[i] != '.' && t[i] != 'e' && t[i] != 'E'; ++i) {
    if (t[i] < '0' || t[i] > '9')
      throw ParseError("bad numeric literal '" + std::string(text) + "'");
    if (mantissa > (INT64_MAX - 9) / 10)
      throw OverflowError("numeric literal too large: " + std::string(text));
    mantissa = mantissa * 10 + (t[i] - '0');
    seen_digit = true;
  }
  if (i < t.size() && t[i] == '.') {
    for (++i; i < t.size() && t[i] != 'e' && t[i] != 'E'; ++i) {
      if (t[i] < '0' || t[i] > '9')
        throw ParseError("bad numeric literal '" + std::string(text) + "'");
      if (mantissa > (INT64_MAX - 9) / 10)
        throw OverflowError("numeric literal too precise: " +
                            std::string(text));
      mantissa = mantissa * 10 + (t[i] - '0');
      ++frac_digits;
      seen_digit = true;
    }
  }
  if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
    const std::string e(t.substr(i + 1));
    errno = 0;
    char* end = nullptr;
    exponent = std::strtoll(e.c_str(), &end, 10);
    if (errno != 0 || end == e.c_str() || *end != '\0')
      throw ParseError("bad exponent in '" + std::string(text) + "'");
    i = t.size();
  }
  if (!seen_digit || i != t.size())
    throw ParseError("bad numeric literal '" + std::string(text) + "'");

  const long long pow10 = exponent - frac_digits;
  if (pow10 < -18 || pow10 > 18)
    throw OverflowError("decimal exponent out of range: " + std::string(text));
  Rational r(negative ? -mantissa : mantissa, 1);
  long long p = pow10;
  for (; p > 0; --p) r *= Rational(10, 1);
  for (; p < 0; ++p) r /= Rational(10, 1);
  return r;
}

inline Rational Rational::from_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc())
    throw ParseError("unrepresentable double");
  return parse(std::string_view(buf, res.ptr - buf));
}

}  // namespace levelsp
