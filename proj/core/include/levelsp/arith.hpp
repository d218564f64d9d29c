#pragma once

#include <charconv>
#include <cmath>
#include <string>

#include "levelsp/rational.hpp"

namespace levelsp {

/// Mass-sum and distribution-validity tolerance in float mode.
inline constexpr double kMassTol = 1e-9;
/// Gap below which two float phantom values count as "not strictly increasing".
inline constexpr double kStrictGap = 1e-12;
/// Margin a deviation must beat to count as a strict improvement in float mode.
inline constexpr double kImprovementTol = 1e-9;

/// The two arithmetic modes the library runs in. Exact rationals are the
/// default for audits and golden comparisons; 64-bit floats for bulk tallies.
template <class T>
struct arith;

template <>
struct arith<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";

  static double fraction(long long num, long long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double parse(const std::string& text) {
    return Rational::parse(text).to_double();
  }
  static double to_double(double v) { return v; }
  static std::string render(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }
  /// a is strictly below b by more than the given margin.
  static bool strictly_less(double a, double b, double margin) {
    return a < b - margin;
  }
  static bool near(double a, double b, double tol) {
    return std::fabs(a - b) <= tol;
  }
};

template <>
struct arith<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";

  static Rational fraction(long long num, long long den) {
    return Rational(num, den);
  }
  static Rational parse(const std::string& text) {
    return Rational::parse(text);
  }
  static double to_double(const Rational& v) { return v.to_double(); }
  static std::string render(const Rational& v) { return v.str(); }
  static bool strictly_less(const Rational& a, const Rational& b,
                            double /*margin*/) {
    return a < b;
  }
  static bool near(const Rational& a, const Rational& b, double /*tol*/) {
    return a == b;
  }
};

template <class T>
T abs_diff(const T& a, const T& b) {
  return a < b ? b - a : a - b;
}

}  // namespace levelsp
