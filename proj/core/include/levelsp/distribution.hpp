#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "levelsp/arith.hpp"
#include "levelsp/errors.hpp"
#include "levelsp/scale.hpp"

namespace levelsp {

template <class T>
class Cdf;

/// Probability mass vector over an OutcomeScale: one entry per grade,
/// entries in [0,1] summing to 1 (exactly in exact mode, within kMassTol
/// in float mode).
template <class T>
class Pmf {
 public:
  Pmf(ScalePtr scale, std::vector<T> mass)
      : scale_(std::move(scale)), mass_(std::move(mass)) {
    if (!scale_) throw InvalidDistribution("pmf without a scale");
    if (static_cast<int>(mass_.size()) != scale_->size())
      throw InvalidDistribution("pmf length does not match scale size");
    T sum(0);
    for (const T& v : mass_) {
      if (v < T(0) || v > T(1))
        throw InvalidDistribution("pmf entry outside [0,1]");
      sum += v;
    }
    if constexpr (arith<T>::exact) {
      if (sum != T(1)) throw InvalidDistribution("pmf mass does not sum to 1");
    } else {
      if (std::fabs(arith<T>::to_double(sum) - 1.0) > kMassTol)
        throw InvalidDistribution("pmf mass does not sum to 1 within 1e-9");
    }
  }

  static Pmf dirac(ScalePtr scale, int grade) {
    std::vector<T> mass(scale->size(), T(0));
    mass.at(grade) = T(1);
    return Pmf(std::move(scale), std::move(mass));
  }

  const OutcomeScale& scale() const { return *scale_; }
  const ScalePtr& scale_ptr() const { return scale_; }
  const std::vector<T>& mass() const { return mass_; }
  int grades() const { return static_cast<int>(mass_.size()); }

  friend bool operator==(const Pmf& a, const Pmf& b) {
    return *a.scale_ == *b.scale_ && a.mass_ == b.mass_;
  }
  friend bool operator!=(const Pmf& a, const Pmf& b) { return !(a == b); }

 private:
  ScalePtr scale_;
  std::vector<T> mass_;
};

/// Cumulative distribution over an OutcomeScale: nondecreasing values in
/// [0,1], final entry 1. cum()[j] is the probability of the level event
/// "outcome at most grade j".
template <class T>
class Cdf {
 public:
  Cdf(ScalePtr scale, std::vector<T> cum)
      : scale_(std::move(scale)), cum_(std::move(cum)) {
    if (!scale_) throw InvalidCdf("cdf without a scale");
    if (static_cast<int>(cum_.size()) != scale_->size())
      throw InvalidCdf("cdf length does not match scale size");
    for (size_t j = 0; j < cum_.size(); ++j) {
      if (cum_[j] < T(0) || cum_[j] > T(1))
        throw InvalidCdf("cdf entry outside [0,1]");
      if (j > 0 && cum_[j] < cum_[j - 1])
        throw InvalidCdf("cdf decreases between grade " + std::to_string(j - 1) +
                         " and grade " + std::to_string(j));
    }
    if constexpr (arith<T>::exact) {
      if (cum_.back() != T(1)) throw InvalidCdf("cdf does not end at 1");
    } else {
      if (std::fabs(arith<T>::to_double(cum_.back()) - 1.0) > kMassTol)
        throw InvalidCdf("cdf does not end at 1 within 1e-9");
    }
  }

  const OutcomeScale& scale() const { return *scale_; }
  const ScalePtr& scale_ptr() const { return scale_; }
  const std::vector<T>& cum() const { return cum_; }
  int grades() const { return static_cast<int>(cum_.size()); }

  friend bool operator==(const Cdf& a, const Cdf& b) {
    return *a.scale_ == *b.scale_ && a.cum_ == b.cum_;
  }
  friend bool operator!=(const Cdf& a, const Cdf& b) { return !(a == b); }

 private:
  ScalePtr scale_;
  std::vector<T> cum_;
};

/// The bijection pi: prefix sums of the mass vector.
template <class T>
Cdf<T> pmf_to_cdf(const Pmf<T>& p) {
  std::vector<T> cum(p.mass().size());
  T run(0);
  for (size_t j = 0; j < cum.size(); ++j) {
    run += p.mass()[j];
    cum[j] = run;
  }
  if constexpr (!arith<T>::exact) {
    // float prefix sums can land a hair above 1
    for (T& v : cum)
      if (v > T(1) && v <= T(1) + kMassTol) v = T(1);
  }
  return Cdf<T>(p.scale_ptr(), std::move(cum));
}

/// Inverse of pi: successive differences. Float-mode rounding residue in
/// [-kMassTol, 0) is clamped to zero; anything lower is a real decrease.
template <class T>
Pmf<T> cdf_to_pmf(const Cdf<T>& c) {
  std::vector<T> mass(c.cum().size());
  for (size_t j = 0; j < mass.size(); ++j) {
    T d = j == 0 ? c.cum()[0] : c.cum()[j] - c.cum()[j - 1];
    if constexpr (!arith<T>::exact) {
      if (d < T(0) && d >= T(-kMassTol)) d = T(0);
    }
    mass[j] = d;
  }
  return Pmf<T>(c.scale_ptr(), std::move(mass));
}

/// Generalized inverse: the lowest grade whose cumulative reaches x.
/// Left-continuous step function of x on (0, 1].
template <class T>
int quantile(const Cdf<T>& c, const T& x) {
  if (x <= T(0) || x > T(1))
    throw DomainError("quantile argument must lie in (0, 1]");
  const auto& cum = c.cum();
  const auto it = std::lower_bound(cum.begin(), cum.end(), x);
  // cum.back() == 1 >= x, so the bound always exists
  return static_cast<int>(it - cum.begin());
}

/// L_r distance between cumulatives under counting measure on the grades.
template <class T>
double cdf_distance(const Cdf<T>& p, const Cdf<T>& q, double r) {
  require_same_scale(p.scale(), q.scale(), "cdf_distance");
  if (!(r > 0)) throw DomainError("cdf_distance needs r > 0");
  double acc = 0;
  for (int j = 0; j < p.grades(); ++j) {
    const double d = std::fabs(arith<T>::to_double(p.cum()[j]) -
                               arith<T>::to_double(q.cum()[j]));
    acc += std::pow(d, r);
  }
  return std::pow(acc, 1.0 / r);
}

/// Sum of |P(a)-Q(a)|^r for integer r, kept in the scalar type so exact-mode
/// audits can compare distances without taking roots.
template <class T>
T cdf_distance_pow(const Cdf<T>& p, const Cdf<T>& q, int r) {
  require_same_scale(p.scale(), q.scale(), "cdf_distance_pow");
  if (r < 1) throw DomainError("cdf_distance_pow needs integer r >= 1");
  T acc(0);
  for (int j = 0; j < p.grades(); ++j) {
    const T d = abs_diff(p.cum()[j], q.cum()[j]);
    T term = d;
    for (int k = 1; k < r; ++k) term *= d;
    acc += term;
  }
  return acc;
}

/// L1 distance between mass vectors (the probability-space metric).
template <class T>
T prob_distance_l1(const Pmf<T>& p, const Pmf<T>& q) {
  require_same_scale(p.scale(), q.scale(), "prob_distance_l1");
  T acc(0);
  for (int j = 0; j < p.grades(); ++j)
    acc += abs_diff(p.mass()[j], q.mass()[j]);
  return acc;
}

/// Pointwise CDF dominance: P(a) >= Q(a) at every grade.
template <class T>
bool dominates(const Cdf<T>& p, const Cdf<T>& q) {
  require_same_scale(p.scale(), q.scale(), "dominates");
  for (int j = 0; j < p.grades(); ++j)
    if (p.cum()[j] < q.cum()[j]) return false;
  return true;
}

/// An election-style input: one cumulative per voter plus nonnegative
/// weights (not all zero), all on one scale.
template <class T>
class Profile {
 public:
  Profile(std::vector<Cdf<T>> voters, std::vector<T> weights)
      : voters_(std::move(voters)), weights_(std::move(weights)) {
    if (voters_.empty()) throw ProfileError("profile needs at least one voter");
    if (weights_.size() != voters_.size())
      throw ProfileError("profile has " + std::to_string(voters_.size()) +
                         " voters but " + std::to_string(weights_.size()) +
                         " weights");
    for (size_t i = 1; i < voters_.size(); ++i)
      require_same_scale(voters_[0].scale(), voters_[i].scale(), "Profile");
    T sum(0);
    for (const T& w : weights_) {
      if (w < T(0)) throw InvalidWeights("negative voter weight");
      sum += w;
    }
    if (!(sum > T(0))) throw InvalidWeights("profile weights are all zero");
  }

  static Profile equal_weights(std::vector<Cdf<T>> voters) {
    std::vector<T> w(voters.size(), T(1));
    return Profile(std::move(voters), std::move(w));
  }

  static Profile from_pmfs(const std::vector<Pmf<T>>& pmfs,
                           std::vector<T> weights) {
    std::vector<Cdf<T>> voters;
    voters.reserve(pmfs.size());
    for (const auto& p : pmfs) voters.push_back(pmf_to_cdf(p));
    return Profile(std::move(voters), std::move(weights));
  }

  int size() const { return static_cast<int>(voters_.size()); }
  int grades() const { return voters_[0].grades(); }
  const OutcomeScale& scale() const { return voters_[0].scale(); }
  const ScalePtr& scale_ptr() const { return voters_[0].scale_ptr(); }
  const std::vector<Cdf<T>>& voters() const { return voters_; }
  const Cdf<T>& voter(int i) const { return voters_.at(i); }
  const std::vector<T>& weights() const { return weights_; }

  /// Level vector at one grade: (P_1(a), ..., P_n(a)).
  std::vector<T> levels_at(int grade) const {
    std::vector<T> out(voters_.size());
    for (size_t i = 0; i < voters_.size(); ++i)
      out[i] = voters_[i].cum()[grade];
    return out;
  }

  Profile with_voter(int i, Cdf<T> replacement) const {
    std::vector<Cdf<T>> v = voters_;
    v.at(i) = std::move(replacement);
    return Profile(std::move(v), weights_);
  }

 private:
  std::vector<Cdf<T>> voters_;
  std::vector<T> weights_;
};

/// If the profile is a chain under pointwise dominance, returns voter
/// indices sigma with P_sigma[0] >= P_sigma[1] >= ... pointwise; otherwise
/// nullopt. Sorting descending-lexicographically puts any true chain in
/// order, so one verification pass suffices.
template <class T>
std::optional<std::vector<int>> is_dominated_profile(const Profile<T>& prof) {
  std::vector<int> order(prof.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return prof.voter(a).cum() > prof.voter(b).cum();
  });
  for (size_t i = 0; i + 1 < order.size(); ++i)
    if (!dominates(prof.voter(order[i]), prof.voter(order[i + 1])))
      return std::nullopt;
  return order;
}

}  // namespace levelsp
