#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levelsp/distribution.hpp"
#include "levelsp/phantoms.hpp"

namespace levelsp {

/// Max-min rule at one grade: max over coalitions S of
/// min(f_S(a), min_{i in S} level_i).
///
/// Only coalitions of the form {i : level_i >= y} can attain the max, so the
/// evaluation walks prefixes of the levels sorted descending; the full 2^n
/// enumeration lives in the tests as the independent oracle.
template <class T>
T maxmin_level(const GeneralPhantoms<T>& sys, std::span<const T> levels,
               int grade) {
  if (static_cast<int>(levels.size()) != sys.voters())
    throw ProfileError("level vector length does not match the phantom system");
  if (grade < 0 || grade >= sys.grades())
    throw DomainError("grade index out of range");
  std::vector<int> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return levels[b] < levels[a]; });
  T best = sys.value(0, grade);  // empty coalition
  unsigned mask = 0;
  for (int idx : order) {
    mask |= 1u << idx;
    const T term = std::min(sys.value(mask, grade), levels[idx]);
    if (best < term) best = term;
  }
  return best;
}

/// Median rule at one grade: median of the n levels and the n+1 phantom
/// values, a multiset of odd size 2n+1.
template <class T>
T median_level(const AnonymousPhantoms<T>& sys, std::span<const T> levels,
               int grade) {
  if (static_cast<int>(levels.size()) != sys.voters())
    throw ProfileError("level vector length does not match the phantom system");
  if (grade < 0 || grade >= sys.grades())
    throw DomainError("grade index out of range");
  std::vector<T> pool(levels.begin(), levels.end());
  pool.reserve(2 * levels.size() + 1);
  for (int k = 0; k <= sys.voters(); ++k) pool.push_back(sys.value(k, grade));
  const auto mid = pool.begin() + pool.size() / 2;
  std::nth_element(pool.begin(), mid, pool.end());
  return *mid;
}

/// k-th order cumulative: pointwise k-th smallest input CDF (k is 1-based;
/// k = 1 is the pointwise min, k = n the pointwise max).
template <class T>
Cdf<T> order_cumulative(int k, const Profile<T>& prof) {
  const int n = prof.size();
  if (k < 1 || k > n)
    throw DomainError("order statistic k must lie in 1..n");
  std::vector<T> out(prof.grades());
  std::vector<T> levels(n);
  for (int a = 0; a < prof.grades(); ++a) {
    for (int i = 0; i < n; ++i) levels[i] = prof.voter(i).cum()[a];
    std::nth_element(levels.begin(), levels.begin() + (k - 1), levels.end());
    out[a] = levels[k - 1];
  }
  return Cdf<T>(prof.scale_ptr(), std::move(out));
}

/// The one-shot voting rule behind the weighted-proportional-cumulative:
/// sup { y : sum of weights of {i : level_i >= y} >= y }, weights normalized
/// internally. The sup is attained and equals
/// max(0, max_k min(W_k, r_(k))) over the descending sort with cumulative
/// weights W_k, so no grid search appears in the production path.
template <class T>
T mu_w(std::span<const T> weights, std::span<const T> levels) {
  if (weights.size() != levels.size())
    throw ProfileError("mu_w needs one weight per level");
  std::vector<T> w = normalized_weights(std::vector<T>(weights.begin(), weights.end()));
  std::vector<int> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return levels[b] < levels[a]; });
  T best(0);
  T cum(0);
  for (int idx : order) {
    cum += w[idx];
    const T term = std::min(cum, levels[idx]);
    if (best < term) best = term;
  }
  return best;
}

/// Per-grade mu_w of a weighted profile. Output is a valid CDF.
template <class T>
Cdf<T> weighted_proportional(const Profile<T>& prof) {
  std::vector<T> out(prof.grades());
  for (int a = 0; a < prof.grades(); ++a) {
    const std::vector<T> levels = prof.levels_at(a);
    out[a] = mu_w<T>(prof.weights(), levels);
  }
  return Cdf<T>(prof.scale_ptr(), std::move(out));
}

/// mu_w for rational weights s_i/d via the duplication formula: the median
/// of each level repeated s_i times together with the ladder 0, 1/d, ..., 1.
/// Must agree with mu_w exactly; the pair of routes is cross-checked in the
/// test suite.
template <class T>
T rational_weights_median(std::span<const long long> numerators, long long d,
                          std::span<const T> levels) {
  if (d <= 0) throw InvalidWeights("common denominator must be positive");
  if (numerators.size() != levels.size())
    throw InvalidWeights("one numerator per level required");
  long long total = 0;
  for (long long s : numerators) {
    if (s < 0) throw InvalidWeights("negative weight numerator");
    total += s;
  }
  if (total != d)
    throw InvalidWeights("weight numerators must sum to the denominator");
  std::vector<T> pool;
  pool.reserve(2 * d + 1);
  for (size_t i = 0; i < numerators.size(); ++i)
    for (long long c = 0; c < numerators[i]; ++c) pool.push_back(levels[i]);
  for (long long j = 0; j <= d; ++j)
    pool.push_back(arith<T>::fraction(j, d));
  const auto mid = pool.begin() + pool.size() / 2;
  std::nth_element(pool.begin(), mid, pool.end());
  return *mid;
}

/// Grading-curve aggregation at one grade:
/// sup { y : gamma(a, weight fraction of {i : level_i >= y}) >= y }.
///
/// The weight fraction is a step function of y with breakpoints at the
/// sorted levels; on the piece (r_(j+1), r_(j)] it is constant, so the sup
/// is the max over pieces of min(piece upper end, gamma value), restricted
/// to nonempty feasible pieces, together with y = 0.
template <class T>
T grading_curve_level(const GradingCurve<T>& curve, std::span<const T> weights,
                      std::span<const T> levels, int grade) {
  std::vector<T> w = normalized_weights(std::vector<T>(weights.begin(), weights.end()));
  std::vector<int> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return levels[b] < levels[a]; });

  T best(0);
  T frac(0);
  T upper(1);  // upper end of the current piece
  for (size_t j = 0; j <= order.size(); ++j) {
    // piece (lower, upper] where the fraction counts the j largest levels
    const T lower = j < order.size() ? levels[order[j]] : T(0);
    if (lower < upper || j == order.size()) {
      const T g = curve.eval(grade, frac);
      const T val = std::min(upper, g);
      if (val > lower && best < val) best = val;
    }
    if (j < order.size()) {
      upper = levels[order[j]];
      frac += w[order[j]];
    }
  }
  return best;
}

template <class T>
Cdf<T> grading_curve_aggregate(const GradingCurve<T>& curve,
                               const Profile<T>& prof) {
  if (curve.table_grades() != 0 && curve.table_grades() != prof.grades())
    throw InvalidCurve("table curve grade count does not match the profile");
  std::vector<T> out(prof.grades());
  for (int a = 0; a < prof.grades(); ++a) {
    const std::vector<T> levels = prof.levels_at(a);
    out[a] = grading_curve_level(curve, std::span<const T>(prof.weights()),
                                 std::span<const T>(levels), a);
  }
  return Cdf<T>(prof.scale_ptr(), std::move(out));
}

/// Closed-form weighted-proportional-cumulative for chain profiles, the
/// independent route for dominated inputs. Voters must already be sorted so
/// that P_1 >= ... >= P_n pointwise. At each grade the aggregate either
/// follows the voter whose cumulative sits inside their weight window
/// [W_{i-1}, W_i) or parks at the straddled boundary W_i.
template <class T>
Pmf<T> dominated_fastpath(const Profile<T>& prof) {
  const int n = prof.size();
  for (int i = 0; i + 1 < n; ++i)
    if (!dominates(prof.voter(i), prof.voter(i + 1)))
      throw NotDominated("profile is not sorted into a dominance chain");

  std::vector<T> w = normalized_weights(prof.weights());
  std::vector<T> prefix(n);
  T run(0);
  for (int i = 0; i < n; ++i) {
    run += w[i];
    prefix[i] = run;
  }

  std::vector<T> out(prof.grades());
  for (int a = 0; a < prof.grades(); ++a) {
    const std::vector<T> r = prof.levels_at(a);
    bool settled = false;
    for (int i = 0; i < n && !settled; ++i) {
      const T lo = i == 0 ? T(0) : prefix[i - 1];
      if (lo <= r[i] && r[i] < prefix[i]) {
        out[a] = r[i];
        settled = true;
      }
    }
    if (!settled) {
      for (int i = n - 1; i >= 0; --i) {
        if (r[i] >= prefix[i]) {
          out[a] = prefix[i];
          settled = true;
          break;
        }
      }
    }
    if (!settled) out[a] = T(0);  // unreachable for valid chains
  }
  return cdf_to_pmf(Cdf<T>(prof.scale_ptr(), std::move(out)));
}

// ---------------------------------------------------------------------------
// Method descriptors and the dispatch facade

/// A uniform handle on every aggregation rule the library ships, including
/// the deliberately non-strategyproof mean used as the audit counterexample.
template <class T>
class Method {
 public:
  struct MaxMin {
    GeneralPhantoms<T> phantoms;
  };
  struct MedianPhantoms {
    AnonymousPhantoms<T> phantoms;
  };
  struct Order {
    int k;  // 1-based order statistic
  };
  struct Proportional {};  // equal weights
  struct WeightedProportional {
    std::vector<T> weights;  // empty: take the profile's weights
  };
  struct Curve {
    GradingCurve<T> curve;
    std::vector<T> weights;  // empty: take the profile's weights
  };
  struct Mean {};  // weighted average; certainty preserving, not Level-SP
  struct Dictator {
    int voter;
  };
  using Spec = std::variant<MaxMin, MedianPhantoms, Order, Proportional,
                            WeightedProportional, Curve, Mean, Dictator>;

  static Method maxmin(GeneralPhantoms<T> phantoms) {
    require_valid(phantoms);
    return Method(MaxMin{std::move(phantoms)}, "maxmin");
  }
  static Method median(AnonymousPhantoms<T> phantoms) {
    require_valid(phantoms);
    return Method(MedianPhantoms{std::move(phantoms)}, "median");
  }
  static Method order(int k) {
    return Method(Order{k}, "order:" + std::to_string(k));
  }
  static Method proportional() { return Method(Proportional{}, "proportional"); }
  static Method weighted_proportional(std::vector<T> weights = {}) {
    if (!weights.empty()) normalized_weights(weights);  // reject bad vectors now
    return Method(WeightedProportional{std::move(weights)},
                  "weighted-proportional");
  }
  static Method grading_curve(GradingCurve<T> curve,
                              std::vector<T> weights = {}) {
    if (!weights.empty()) normalized_weights(weights);
    return Method(Curve{std::move(curve), std::move(weights)}, "grading-curve");
  }
  static Method mean() { return Method(Mean{}, "mean"); }
  static Method dictator(int voter) {
    return Method(Dictator{voter}, "dictator:" + std::to_string(voter));
  }

  const Spec& spec() const { return spec_; }
  const std::string& name() const { return name_; }

 private:
  template <class Sys>
  static void require_valid(const Sys& sys) {
    const auto diag = validate(sys);
    if (!diag.ok())
      throw ProfileError("phantom system is invalid: " +
                         diag.violations.front().message);
  }

  Method(Spec spec, std::string name)
      : spec_(std::move(spec)), name_(std::move(name)) {}

  Spec spec_;
  std::string name_;
};

namespace detail {

template <class T>
std::vector<T> resolve_weights(const std::vector<T>& override_w,
                               const Profile<T>& prof) {
  if (override_w.empty()) return prof.weights();
  if (override_w.size() != static_cast<size_t>(prof.size()))
    throw ProfileError("method weights do not match the profile size");
  return override_w;
}

}  // namespace detail

/// Dispatch facade: every descriptor yields a valid CDF on a valid profile.
template <class T>
Cdf<T> aggregate(const Method<T>& method, const Profile<T>& prof) {
  using M = Method<T>;
  const int n = prof.size();
  const int m = prof.grades();
  return std::visit(
      [&](const auto& spec) -> Cdf<T> {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, typename M::MaxMin>) {
          if (spec.phantoms.voters() != n || spec.phantoms.grades() != m)
            throw ProfileError("phantom system does not match the profile");
          std::vector<T> out(m);
          for (int a = 0; a < m; ++a) {
            const std::vector<T> levels = prof.levels_at(a);
            out[a] = maxmin_level(spec.phantoms, std::span<const T>(levels), a);
          }
          return Cdf<T>(prof.scale_ptr(), std::move(out));
        } else if constexpr (std::is_same_v<S, typename M::MedianPhantoms>) {
          if (spec.phantoms.voters() != n || spec.phantoms.grades() != m)
            throw ProfileError("phantom system does not match the profile");
          std::vector<T> out(m);
          for (int a = 0; a < m; ++a) {
            const std::vector<T> levels = prof.levels_at(a);
            out[a] = median_level(spec.phantoms, std::span<const T>(levels), a);
          }
          return Cdf<T>(prof.scale_ptr(), std::move(out));
        } else if constexpr (std::is_same_v<S, typename M::Order>) {
          return order_cumulative(spec.k, prof);
        } else if constexpr (std::is_same_v<S, typename M::Proportional>) {
          const std::vector<T> equal(n, T(1));
          std::vector<T> out(m);
          for (int a = 0; a < m; ++a) {
            const std::vector<T> levels = prof.levels_at(a);
            out[a] = mu_w(std::span<const T>(equal), std::span<const T>(levels));
          }
          return Cdf<T>(prof.scale_ptr(), std::move(out));
        } else if constexpr (std::is_same_v<S,
                                            typename M::WeightedProportional>) {
          const std::vector<T> w = detail::resolve_weights(spec.weights, prof);
          std::vector<T> out(m);
          for (int a = 0; a < m; ++a) {
            const std::vector<T> levels = prof.levels_at(a);
            out[a] = mu_w(std::span<const T>(w), std::span<const T>(levels));
          }
          return Cdf<T>(prof.scale_ptr(), std::move(out));
        } else if constexpr (std::is_same_v<S, typename M::Curve>) {
          const std::vector<T> w = detail::resolve_weights(spec.weights, prof);
          if (spec.curve.table_grades() != 0 && spec.curve.table_grades() != m)
            throw InvalidCurve("table curve grade count does not match");
          std::vector<T> out(m);
          for (int a = 0; a < m; ++a) {
            const std::vector<T> levels = prof.levels_at(a);
            out[a] = grading_curve_level(spec.curve, std::span<const T>(w),
                                         std::span<const T>(levels), a);
          }
          return Cdf<T>(prof.scale_ptr(), std::move(out));
        } else if constexpr (std::is_same_v<S, typename M::Mean>) {
          const std::vector<T> w = normalized_weights(prof.weights());
          std::vector<T> out(m, T(0));
          for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a) out[a] += w[i] * prof.voter(i).cum()[a];
          if constexpr (!arith<T>::exact) {
            for (T& v : out)
              if (v > T(1) && v <= T(1) + kMassTol) v = T(1);
          }
          return Cdf<T>(prof.scale_ptr(), std::move(out));
        } else if constexpr (std::is_same_v<S, typename M::Dictator>) {
          if (spec.voter < 0 || spec.voter >= n)
            throw ProfileError("dictator index out of range");
          return prof.voter(spec.voter);
        } else {
          throw ConfigError("unknown method descriptor");
        }
      },
      method.spec());
}

/// The phantom system a built-in method aggregates with, when it has one.
/// The mean has none (it is not level-strategyproof), and the dictatorship
/// is exposed as its general system. Used by the audit layer to compare
/// syntactic and semantic axiom verdicts.
template <class T>
std::optional<PhantomSystem<T>> phantom_system_of(const Method<T>& method,
                                                  int voters, int grades) {
  using M = Method<T>;
  return std::visit(
      [&](const auto& spec) -> std::optional<PhantomSystem<T>> {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, typename M::MaxMin>) {
          return PhantomSystem<T>(spec.phantoms);
        } else if constexpr (std::is_same_v<S, typename M::MedianPhantoms>) {
          return PhantomSystem<T>(spec.phantoms);
        } else if constexpr (std::is_same_v<S, typename M::Order>) {
          // k-th smallest = anonymous phantoms with n+1-k zeros then k ones
          std::vector<std::vector<T>> fn(voters + 1);
          for (int j = 0; j <= voters; ++j)
            fn[j].assign(grades, j <= voters - spec.k ? T(0) : T(1));
          return PhantomSystem<T>(AnonymousPhantoms<T>(std::move(fn)));
        } else if constexpr (std::is_same_v<S, typename M::Proportional>) {
          std::vector<std::vector<T>> fn(voters + 1);
          for (int j = 0; j <= voters; ++j)
            fn[j].assign(grades, arith<T>::fraction(j, voters));
          return PhantomSystem<T>(AnonymousPhantoms<T>(std::move(fn)));
        } else if constexpr (std::is_same_v<S,
                                            typename M::WeightedProportional>) {
          std::vector<T> w = spec.weights.empty()
                                 ? std::vector<T>(voters, T(1))
                                 : spec.weights;
          return PhantomSystem<T>(phantoms_from_weights(w, grades));
        } else if constexpr (std::is_same_v<S, typename M::Curve>) {
          std::vector<T> w = spec.weights.empty()
                                 ? std::vector<T>(voters, T(1))
                                 : spec.weights;
          return PhantomSystem<T>(
              phantoms_from_grading_curve(spec.curve, w, grades));
        } else if constexpr (std::is_same_v<S, typename M::Dictator>) {
          std::vector<std::vector<T>> fn(size_t(1) << voters);
          for (unsigned mask = 0; mask < fn.size(); ++mask)
            fn[mask].assign(grades,
                            (mask >> spec.voter) & 1u ? T(1) : T(0));
          return PhantomSystem<T>(GeneralPhantoms<T>(voters, std::move(fn)));
        } else {
          return std::nullopt;  // mean
        }
      },
      method.spec());
}

}  // namespace levelsp
