#pragma once

#include <algorithm>
#include <bit>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levelsp/arith.hpp"
#include "levelsp/errors.hpp"

namespace levelsp {

/// General systems materialize all 2^n phantom functions; audits are
/// desk-scale by design, so the voter count is capped.
inline constexpr int kMaxGeneralVoters = 12;

/// Phantom functions for every coalition of voters: f_[mask] is the
/// nondecreasing [0,1]-valued function (one value per grade) attached to the
/// coalition whose members are the set bits of mask.
template <class T>
class GeneralPhantoms {
 public:
  GeneralPhantoms(int voters, std::vector<std::vector<T>> functions)
      : voters_(voters), f_(std::move(functions)) {
    if (voters < 1 || voters > kMaxGeneralVoters)
      throw DomainError("general phantom systems support 1.." +
                        std::to_string(kMaxGeneralVoters) + " voters");
    if (f_.size() != (size_t(1) << voters))
      throw DomainError("general phantom system needs 2^n functions");
    const size_t m = f_[0].size();
    if (m == 0) throw DomainError("phantom functions need at least one grade");
    for (const auto& fn : f_)
      if (fn.size() != m)
        throw DomainError("phantom functions disagree on grade count");
  }

  int voters() const { return voters_; }
  int grades() const { return static_cast<int>(f_[0].size()); }
  int coalitions() const { return 1 << voters_; }
  const std::vector<T>& of(unsigned mask) const { return f_.at(mask); }
  const T& value(unsigned mask, int grade) const { return f_[mask][grade]; }

 private:
  int voters_;
  std::vector<std::vector<T>> f_;
};

/// Anonymous systems: n+1 phantom functions f_0 <= ... <= f_n indexed by
/// coalition size.
template <class T>
class AnonymousPhantoms {
 public:
  explicit AnonymousPhantoms(std::vector<std::vector<T>> functions)
      : f_(std::move(functions)) {
    if (f_.size() < 2)
      throw DomainError("anonymous phantom system needs n+1 >= 2 functions");
    const size_t m = f_[0].size();
    if (m == 0) throw DomainError("phantom functions need at least one grade");
    for (const auto& fn : f_)
      if (fn.size() != m)
        throw DomainError("phantom functions disagree on grade count");
  }

  int voters() const { return static_cast<int>(f_.size()) - 1; }
  int grades() const { return static_cast<int>(f_[0].size()); }
  const std::vector<T>& of(int k) const { return f_.at(k); }
  const T& value(int k, int grade) const { return f_[k][grade]; }

  /// The general system with f_S := f_{|S|}; reproduces the median aggregate
  /// through the max-min formula.
  GeneralPhantoms<T> induced_general() const {
    const int n = voters();
    if (n > kMaxGeneralVoters)
      throw DomainError("too many voters to materialize the general system");
    std::vector<std::vector<T>> fn(size_t(1) << n);
    for (unsigned mask = 0; mask < fn.size(); ++mask)
      fn[mask] = f_[std::popcount(mask)];
    return GeneralPhantoms<T>(n, std::move(fn));
  }

 private:
  std::vector<std::vector<T>> f_;
};

template <class T>
using PhantomSystem = std::variant<GeneralPhantoms<T>, AnonymousPhantoms<T>>;

// ---------------------------------------------------------------------------
// Validation

struct PhantomViolation {
  enum class Kind {
    value_out_of_range,     // some f value outside [0,1]
    not_monotone_in_grade,  // f decreases between consecutive grades
    coalition_monotonicity, // S subset S' but f_S > f_S' somewhere
    boundary_top,           // f_N (or f_n) does not end at 1
  };
  Kind kind;
  unsigned subset = 0;   // offending coalition mask (general) or k (anonymous)
  unsigned subset2 = 0;  // the enclosing coalition for monotonicity faults
  int grade = -1;
  std::string message;
};

struct PhantomDiagnostics {
  std::vector<PhantomViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

template <class T>
void check_function_shape(const std::vector<T>& fn, unsigned id,
                          PhantomDiagnostics& diag) {
  for (size_t a = 0; a < fn.size(); ++a) {
    if (fn[a] < T(0) || fn[a] > T(1)) {
      diag.violations.push_back({PhantomViolation::Kind::value_out_of_range,
                                 id, 0, static_cast<int>(a),
                                 "phantom value outside [0,1]"});
    }
    if (a > 0 && fn[a] < fn[a - 1]) {
      diag.violations.push_back({PhantomViolation::Kind::not_monotone_in_grade,
                                 id, 0, static_cast<int>(a),
                                 "phantom function decreases between grades"});
    }
  }
}

}  // namespace detail

/// Reports every violated invariant of the max-min characterization on a
/// finite scale: monotonicity over grades, coalition monotonicity, and the
/// top boundary f_N(top) = 1. Right continuity is vacuous on finite scales
/// and therefore not checked. An empty report means the system defines a
/// level-strategyproof aggregator.
template <class T>
PhantomDiagnostics validate(const GeneralPhantoms<T>& sys) {
  PhantomDiagnostics diag;
  for (unsigned mask = 0; mask < unsigned(sys.coalitions()); ++mask)
    detail::check_function_shape(sys.of(mask), mask, diag);
  // single-element extensions imply the full subset order by transitivity
  for (unsigned mask = 0; mask < unsigned(sys.coalitions()); ++mask) {
    for (int i = 0; i < sys.voters(); ++i) {
      if (mask & (1u << i)) continue;
      const unsigned bigger = mask | (1u << i);
      for (int a = 0; a < sys.grades(); ++a) {
        if (sys.value(mask, a) > sys.value(bigger, a)) {
          diag.violations.push_back(
              {PhantomViolation::Kind::coalition_monotonicity, mask, bigger, a,
               "f_S exceeds f_{S u {i}} at a grade"});
        }
      }
    }
  }
  const unsigned full = sys.coalitions() - 1;
  if (sys.value(full, sys.grades() - 1) != T(1)) {
    diag.violations.push_back({PhantomViolation::Kind::boundary_top, full, 0,
                               sys.grades() - 1,
                               "f_N must end at 1 on the top grade"});
  }
  return diag;
}

template <class T>
PhantomDiagnostics validate(const AnonymousPhantoms<T>& sys) {
  PhantomDiagnostics diag;
  for (int k = 0; k <= sys.voters(); ++k)
    detail::check_function_shape(sys.of(k), k, diag);
  for (int k = 0; k < sys.voters(); ++k) {
    for (int a = 0; a < sys.grades(); ++a) {
      if (sys.value(k, a) > sys.value(k + 1, a)) {
        diag.violations.push_back(
            {PhantomViolation::Kind::coalition_monotonicity,
             static_cast<unsigned>(k), static_cast<unsigned>(k + 1), a,
             "f_k exceeds f_{k+1} at a grade"});
      }
    }
  }
  if (sys.value(sys.voters(), sys.grades() - 1) != T(1)) {
    diag.violations.push_back({PhantomViolation::Kind::boundary_top,
                               static_cast<unsigned>(sys.voters()), 0,
                               sys.grades() - 1,
                               "f_n must end at 1 on the top grade"});
  }
  return diag;
}

template <class T>
PhantomDiagnostics validate(const PhantomSystem<T>& sys) {
  return std::visit([](const auto& s) { return validate(s); }, sys);
}

// ---------------------------------------------------------------------------
// Syntactic axiom characterizations

namespace detail {

template <class T>
bool constant_over_grades(const std::vector<T>& fn) {
  for (size_t a = 1; a < fn.size(); ++a)
    if (fn[a] != fn[0]) return false;
  return true;
}

template <class T>
bool all_zero(const std::vector<T>& fn) {
  return std::all_of(fn.begin(), fn.end(), [](const T& v) { return v == T(0); });
}

template <class T>
bool all_one(const std::vector<T>& fn) {
  return std::all_of(fn.begin(), fn.end(), [](const T& v) { return v == T(1); });
}

// strictly increasing between consecutive grades wherever the value sits in
// the open interval (0,1)
template <class T>
bool strictly_increasing_off_01(const std::vector<T>& fn) {
  for (size_t a = 0; a + 1 < fn.size(); ++a) {
    const bool flat = arith<T>::exact
                          ? fn[a] == fn[a + 1]
                          : !arith<T>::strictly_less(fn[a], fn[a + 1], kStrictGap);
    if (flat && fn[a] > T(0) && fn[a] < T(1)) return false;
  }
  return true;
}

}  // namespace detail

/// Certainty preservation holds exactly when the system is unanimous
/// (f_empty = 0, f_N = 1) and every phantom function is constant in the grade.
template <class T>
bool is_certainty_preserving(const GeneralPhantoms<T>& sys) {
  if (!detail::all_zero(sys.of(0))) return false;
  if (!detail::all_one(sys.of(sys.coalitions() - 1))) return false;
  for (unsigned mask = 0; mask < unsigned(sys.coalitions()); ++mask)
    if (!detail::constant_over_grades(sys.of(mask))) return false;
  return true;
}

template <class T>
bool is_certainty_preserving(const AnonymousPhantoms<T>& sys) {
  if (!detail::all_zero(sys.of(0))) return false;
  if (!detail::all_one(sys.of(sys.voters()))) return false;
  for (int k = 0; k <= sys.voters(); ++k)
    if (!detail::constant_over_grades(sys.of(k))) return false;
  return true;
}

/// Plausibility preservation holds exactly when every phantom function is
/// strictly increasing between consecutive grades wherever its value lies in
/// (0,1), f_empty stays below 1 before the top grade, and f_N is positive
/// everywhere.
template <class T>
bool is_plausibility_preserving(const GeneralPhantoms<T>& sys) {
  for (unsigned mask = 0; mask < unsigned(sys.coalitions()); ++mask)
    if (!detail::strictly_increasing_off_01(sys.of(mask))) return false;
  const auto& empty = sys.of(0);
  for (int a = 0; a + 1 < sys.grades(); ++a)
    if (empty[a] >= T(1)) return false;
  const auto& full = sys.of(sys.coalitions() - 1);
  for (int a = 0; a < sys.grades(); ++a)
    if (!(full[a] > T(0))) return false;
  return true;
}

template <class T>
bool is_plausibility_preserving(const AnonymousPhantoms<T>& sys) {
  for (int k = 0; k <= sys.voters(); ++k)
    if (!detail::strictly_increasing_off_01(sys.of(k))) return false;
  const auto& empty = sys.of(0);
  for (int a = 0; a + 1 < sys.grades(); ++a)
    if (empty[a] >= T(1)) return false;
  const auto& full = sys.of(sys.voters());
  for (int a = 0; a < sys.grades(); ++a)
    if (!(full[a] > T(0))) return false;
  return true;
}

/// Weak diversity: certainty preservation plus f_S strictly below
/// f_{S u {i}} for every coalition and outside voter.
template <class T>
bool is_weak_diversity(const GeneralPhantoms<T>& sys) {
  if (!is_certainty_preserving(sys)) return false;
  for (unsigned mask = 0; mask < unsigned(sys.coalitions()); ++mask) {
    for (int i = 0; i < sys.voters(); ++i) {
      if (mask & (1u << i)) continue;
      const unsigned bigger = mask | (1u << i);
      for (int a = 0; a < sys.grades(); ++a)
        if (!(sys.value(mask, a) < sys.value(bigger, a))) return false;
    }
  }
  return true;
}

template <class T>
bool is_weak_diversity(const AnonymousPhantoms<T>& sys) {
  return is_weak_diversity(sys.induced_general());
}

template <class T>
bool is_certainty_preserving(const PhantomSystem<T>& sys) {
  return std::visit([](const auto& s) { return is_certainty_preserving(s); }, sys);
}
template <class T>
bool is_plausibility_preserving(const PhantomSystem<T>& sys) {
  return std::visit([](const auto& s) { return is_plausibility_preserving(s); }, sys);
}
template <class T>
bool is_weak_diversity(const PhantomSystem<T>& sys) {
  return std::visit([](const auto& s) { return is_weak_diversity(s); }, sys);
}

// ---------------------------------------------------------------------------
// Constructors

template <class T>
std::vector<T> normalized_weights(std::vector<T> w) {
  T sum(0);
  for (const T& v : w) {
    if (v < T(0)) throw InvalidWeights("negative weight");
    sum += v;
  }
  if (!(sum > T(0))) throw InvalidWeights("weights must not be all zero");
  for (T& v : w) v /= sum;
  return w;
}

/// Constant general system with f_S = sum of the (normalized) weights of S.
/// Certainty preserving by construction; aggregating with it through the
/// max-min formula is the weighted-proportional-cumulative.
template <class T>
GeneralPhantoms<T> phantoms_from_weights(const std::vector<T>& weights,
                                         int grades) {
  const std::vector<T> w = normalized_weights(weights);
  const int n = static_cast<int>(w.size());
  if (n > kMaxGeneralVoters)
    throw DomainError("too many voters for an explicit general system");
  std::vector<std::vector<T>> fn(size_t(1) << n);
  for (unsigned mask = 0; mask < fn.size(); ++mask) {
    T sum(0);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) sum += w[i];
    fn[mask].assign(grades, sum);
  }
  return GeneralPhantoms<T>(n, std::move(fn));
}

// ---------------------------------------------------------------------------
// Grading curves

/// gamma(a, x): for each grade a, a nondecreasing map from the weight
/// fraction x in [0,1] to [0,1]. Closed forms apply uniformly across grades;
/// the sampled form carries one monotone knot table per grade with linear
/// interpolation between knots.
template <class T>
class GradingCurve {
 public:
  enum class Kind { identity, step, affine, table };

  static GradingCurve identity() { return GradingCurve(Kind::identity); }

  /// 1 when x >= threshold, else 0. threshold in (0, 1].
  static GradingCurve step(T threshold) {
    GradingCurve c(Kind::step);
    c.a_ = std::move(threshold);
    if (c.a_ <= T(0) || c.a_ > T(1))
      throw InvalidCurve("step threshold must lie in (0,1]");
    return c;
  }

  /// clamp(slope*x + offset, 0, 1); must reach 1 at x = 1.
  static GradingCurve affine(T slope, T offset) {
    GradingCurve c(Kind::affine);
    c.a_ = std::move(slope);
    c.b_ = std::move(offset);
    if (c.a_ < T(0)) throw InvalidCurve("affine curve must be nondecreasing");
    if (c.a_ + c.b_ < T(1))
      throw InvalidCurve("affine curve must reach 1 at x = 1");
    return c;
  }

  /// One knot table per grade: (x, y) pairs with x covering [0,1].
  static GradingCurve table(std::vector<std::vector<std::pair<T, T>>> knots) {
    GradingCurve c(Kind::table);
    c.knots_ = std::move(knots);
    c.validate_table();
    return c;
  }

  Kind kind() const { return kind_; }
  const T& step_threshold() const { return a_; }
  const T& affine_slope() const { return a_; }
  const T& affine_offset() const { return b_; }
  const std::vector<std::vector<std::pair<T, T>>>& knots() const {
    return knots_;
  }

  /// Number of grades the curve is specialized to; 0 means grade-uniform.
  int table_grades() const {
    return kind_ == Kind::table ? static_cast<int>(knots_.size()) : 0;
  }

  T eval(int grade, const T& x) const {
    switch (kind_) {
      case Kind::identity:
        return x;
      case Kind::step:
        return x >= a_ ? T(1) : T(0);
      case Kind::affine: {
        T v = a_ * x + b_;
        if (v < T(0)) v = T(0);
        if (v > T(1)) v = T(1);
        return v;
      }
      case Kind::table: {
        const auto& row = knots_.at(grade);
        if (x <= row.front().first) return row.front().second;
        for (size_t i = 1; i < row.size(); ++i) {
          if (x <= row[i].first) {
            const T dx = row[i].first - row[i - 1].first;
            if (dx == T(0)) return row[i].second;
            const T t = (x - row[i - 1].first) / dx;
            return row[i - 1].second + t * (row[i].second - row[i - 1].second);
          }
        }
        return row.back().second;
      }
    }
    throw ConfigError("unreachable grading-curve kind");
  }

 private:
  explicit GradingCurve(Kind k) : kind_(k) {}

  void validate_table() const {
    if (knots_.empty()) throw InvalidCurve("table curve needs grade rows");
    for (const auto& row : knots_) {
      if (row.size() < 2) throw InvalidCurve("table row needs >= 2 knots");
      if (row.front().first != T(0) || row.back().first != T(1))
        throw InvalidCurve("table knots must span x in [0,1]");
      for (size_t i = 0; i < row.size(); ++i) {
        if (row[i].second < T(0) || row[i].second > T(1))
          throw InvalidCurve("table value outside [0,1]");
        if (i > 0 && row[i].first < row[i - 1].first)
          throw InvalidCurve("table knots must be sorted by x");
        if (i > 0 && row[i].second < row[i - 1].second)
          throw InvalidCurve("table curve decreases in the weight fraction");
      }
    }
    // nondecreasing in the grade at shared knot positions
    for (size_t g = 1; g < knots_.size(); ++g) {
      for (const auto& [x, y] : knots_[g]) {
        const T below = eval_row(knots_[g - 1], x);
        if (y < below)
          throw InvalidCurve("table curve decreases in the grade");
      }
      for (const auto& [x, y] : knots_[g - 1]) {
        const T above = eval_row(knots_[g], x);
        if (above < y)
          throw InvalidCurve("table curve decreases in the grade");
      }
    }
    if (knots_.back().back().second != T(1))
      throw InvalidCurve("curve must satisfy gamma(top grade, 1) = 1");
  }

  static T eval_row(const std::vector<std::pair<T, T>>& row, const T& x) {
    if (x <= row.front().first) return row.front().second;
    for (size_t i = 1; i < row.size(); ++i) {
      if (x <= row[i].first) {
        const T dx = row[i].first - row[i - 1].first;
        if (dx == T(0)) return row[i].second;
        const T t = (x - row[i - 1].first) / dx;
        return row[i - 1].second + t * (row[i].second - row[i - 1].second);
      }
    }
    return row.back().second;
  }

  Kind kind_;
  T a_{0};
  T b_{0};
  std::vector<std::vector<std::pair<T, T>>> knots_;
};

/// General system with f_S(a) = gamma(a, weight fraction of S). The result
/// is validated; a curve that slipped past its own invariants surfaces here
/// as InvalidCurve.
template <class T>
GeneralPhantoms<T> phantoms_from_grading_curve(const GradingCurve<T>& curve,
                                               const std::vector<T>& weights,
                                               int grades) {
  const std::vector<T> w = normalized_weights(weights);
  const int n = static_cast<int>(w.size());
  if (n > kMaxGeneralVoters)
    throw DomainError("too many voters for an explicit general system");
  if (curve.table_grades() != 0 && curve.table_grades() != grades)
    throw InvalidCurve("table curve grade count does not match the scale");
  std::vector<std::vector<T>> fn(size_t(1) << n);
  for (unsigned mask = 0; mask < fn.size(); ++mask) {
    T frac(0);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) frac += w[i];
    fn[mask].resize(grades);
    for (int a = 0; a < grades; ++a) fn[mask][a] = curve.eval(a, frac);
  }
  GeneralPhantoms<T> sys(n, std::move(fn));
  if (!validate(sys).ok())
    throw InvalidCurve("grading curve induced an invalid phantom system");
  return sys;
}

}  // namespace levelsp
