#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "levelsp/aggregators.hpp"
#include "levelsp/distribution.hpp"

namespace levelsp {

/// Discretized slice of the profile space: n voters over m grades with
/// cumulative values restricted to multiples of 1/grid. Exhaustive mode
/// walks every profile; random mode samples with a fixed seed.
struct InstanceSpace {
  int n = 2;
  int m = 3;
  int grid = 4;
  enum class Mode { exhaustive, random };
  Mode mode = Mode::exhaustive;
  long long samples = 1000;  // random mode only
  uint64_t seed = 0;
  long long budget = 10'000'000;
};

/// All grid CDFs: nondecreasing numerator sequences over {0..grid} of length
/// m whose final entry is grid. Lexicographic order; this order is what makes
/// "first witness found" the lexicographically smallest one.
inline std::vector<std::vector<int>> enumerate_grid_cdfs(int m, int grid) {
  if (m < 1 || grid < 1) throw DomainError("grid space needs m >= 1, grid >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(m, 0);
  cur[m - 1] = grid;
  const auto rec = [&](auto&& self, int pos, int lo) -> void {
    if (pos == m - 1) {
      out.push_back(cur);
      return;
    }
    for (int v = lo; v <= grid; ++v) {
      cur[pos] = v;
      self(self, pos + 1, v);
    }
  };
  rec(rec, 0, 0);
  return out;
}

template <class T>
Cdf<T> cdf_from_grid(const ScalePtr& scale, const std::vector<int>& nums,
                     int grid) {
  std::vector<T> cum(nums.size());
  for (size_t j = 0; j < nums.size(); ++j)
    cum[j] = arith<T>::fraction(nums[j], grid);
  return Cdf<T>(scale, std::move(cum));
}

/// Replayable counterexample: everything needed to rebuild the offending
/// instance on the same grid and reproduce the violation bit for bit.
struct Witness {
  int grid = 0;
  std::vector<std::vector<int>> profile;  // cdf numerators per voter
  int voter = -1;
  std::vector<int> deviation;   // deviating voter's fake cdf
  std::vector<int> deviation2;  // second deviation (two-sided ranking check)
  int grade = -1;               // offending grade, or interval lower end
  int grade2 = -1;              // interval upper end for interval axioms
  std::string before;
  std::string after;
  std::string reference;  // the deviator's own value the aggregate moved toward
  std::string note;
};

struct AuditReport {
  std::string axiom;
  bool holds = true;
  long long instances_checked = 0;
  std::optional<Witness> witness;
  std::string note;
};

/// What a deviating voter is trying to improve.
struct Utility {
  enum class Kind { level, lr_cdf, l1_prob };
  Kind kind = Kind::level;
  int grade = -1;  // level utility: restrict to one grade, -1 = any grade
  int r = 1;       // lr_cdf utility exponent

  static Utility level(int grade = -1) { return {Kind::level, grade, 1}; }
  static Utility lr_cdf(int r) { return {Kind::lr_cdf, -1, r}; }
  static Utility l1_prob() { return {Kind::l1_prob, -1, 1}; }

  std::string name() const {
    switch (kind) {
      case Kind::level:
        return grade < 0 ? "level" : "level:" + std::to_string(grade);
      case Kind::lr_cdf:
        return "lr-cdf:" + std::to_string(r);
      case Kind::l1_prob:
        return "l1-prob";
    }
    return "?";
  }
};

namespace detail {

inline void check_budget(const InstanceSpace& space, size_t cdf_count) {
  if (space.mode != InstanceSpace::Mode::exhaustive) return;
  long double total = 1;
  for (int i = 0; i < space.n; ++i) total *= static_cast<long double>(cdf_count);
  if (total > static_cast<long double>(space.budget))
    throw BudgetExceeded("exhaustive space has ~" + std::to_string((double)total) +
                         " instances, over the budget of " +
                         std::to_string(space.budget));
}

/// Walks profiles of the space in a fixed order: lexicographic odometer for
/// exhaustive mode, seeded draws for random mode.
class ProfileCursor {
 public:
  ProfileCursor(const InstanceSpace& space, size_t cdf_count)
      : space_(space), count_(cdf_count), idx_(space.n, 0), rng_(space.seed) {}

  bool next(std::vector<int>& out) {
    if (space_.mode == InstanceSpace::Mode::exhaustive) {
      if (done_) return false;
      out = idx_;
      int pos = space_.n - 1;
      while (pos >= 0 && ++idx_[pos] == static_cast<int>(count_)) {
        idx_[pos] = 0;
        --pos;
      }
      if (pos < 0) done_ = true;
      return true;
    }
    if (emitted_ >= space_.samples) return false;
    ++emitted_;
    out.resize(space_.n);
    for (int i = 0; i < space_.n; ++i)
      out[i] = static_cast<int>(rng_() % count_);
    return true;
  }

 private:
  InstanceSpace space_;
  size_t count_;
  std::vector<int> idx_;
  std::mt19937_64 rng_;
  bool done_ = false;
  long long emitted_ = 0;
};

/// Weights an audit profile should carry for the given method: the method's
/// own weight vector when it has one, equal weights otherwise.
template <class T>
std::vector<T> audit_weights(const Method<T>& method, int n) {
  using M = Method<T>;
  return std::visit(
      [&](const auto& spec) -> std::vector<T> {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, typename M::WeightedProportional>) {
          if (!spec.weights.empty()) {
            if (spec.weights.size() != static_cast<size_t>(n))
              throw ProfileError("method weights do not match the space");
            return spec.weights;
          }
        } else if constexpr (std::is_same_v<S, typename M::Curve>) {
          if (!spec.weights.empty()) {
            if (spec.weights.size() != static_cast<size_t>(n))
              throw ProfileError("method weights do not match the space");
            return spec.weights;
          }
        }
        return std::vector<T>(n, T(1));
      },
      method.spec());
}

template <class T>
T utility_distance(const Utility& u, const Cdf<T>& aggregate,
                   const Cdf<T>& peak) {
  if (u.kind == Utility::Kind::lr_cdf)
    return cdf_distance_pow(aggregate, peak, u.r);
  return prob_distance_l1(cdf_to_pmf(aggregate), cdf_to_pmf(peak));
}

}  // namespace detail

/// Weight vector audit profiles carry for a method: the method's own
/// weights when it has them, equal weights otherwise.
template <class T>
std::vector<T> method_audit_weights(const Method<T>& method, int n) {
  return detail::audit_weights(method, n);
}

/// Search the space for a profitable deviation under the given utility.
/// Returns the first strict improvement in the canonical enumeration order
/// (profile, voter, deviation, grade), which is deterministic for a given
/// seed; nullopt when the space is exhausted with no improvement.
template <class T>
std::optional<Witness> find_manipulation(const Method<T>& method,
                                         const Utility& utility,
                                         const InstanceSpace& space,
                                         long long* instances_out = nullptr) {
  const auto cdfs = enumerate_grid_cdfs(space.m, space.grid);
  detail::check_budget(space, cdfs.size());
  const ScalePtr scale = OutcomeScale::indexed(space.m);
  const std::vector<T> weights = detail::audit_weights(method, space.n);

  std::vector<Cdf<T>> pool;
  pool.reserve(cdfs.size());
  for (const auto& nums : cdfs)
    pool.push_back(cdf_from_grid<T>(scale, nums, space.grid));

  detail::ProfileCursor cursor(space, cdfs.size());
  std::vector<int> idx;
  long long instances = 0;
  while (cursor.next(idx)) {
    ++instances;
    std::vector<Cdf<T>> voters;
    voters.reserve(space.n);
    for (int i : idx) voters.push_back(pool[i]);
    Profile<T> prof(std::move(voters), weights);
    const Cdf<T> agg = aggregate(method, prof);

    for (int v = 0; v < space.n; ++v) {
      const Cdf<T>& truth = prof.voter(v);
      const T base_dist = utility.kind == Utility::Kind::level
                              ? T(0)
                              : detail::utility_distance(utility, agg, truth);
      for (size_t d = 0; d < pool.size(); ++d) {
        if (static_cast<int>(d) == idx[v]) continue;
        const Profile<T> deviated = prof.with_voter(v, pool[d]);
        const Cdf<T> agg2 = aggregate(method, deviated);

        if (utility.kind == Utility::Kind::level) {
          const int lo = utility.grade < 0 ? 0 : utility.grade;
          const int hi = utility.grade < 0 ? space.m - 1 : utility.grade;
          for (int a = lo; a <= hi; ++a) {
            const T mine = truth.cum()[a];
            const T before = agg.cum()[a];
            const T after = agg2.cum()[a];
            const bool pushed_down =
                mine < before &&
                arith<T>::strictly_less(after, before, kImprovementTol);
            const bool pushed_up =
                mine > before &&
                arith<T>::strictly_less(before, after, kImprovementTol);
            if (pushed_down || pushed_up) {
              if (instances_out) *instances_out = instances;
              Witness w;
              w.grid = space.grid;
              for (int i : idx) w.profile.push_back(cdfs[i]);
              w.voter = v;
              w.deviation = cdfs[d];
              w.grade = a;
              w.before = arith<T>::render(before);
              w.after = arith<T>::render(after);
              w.reference = arith<T>::render(mine);
              w.note = pushed_down ? "aggregate pulled down toward the deviator"
                                   : "aggregate pushed up toward the deviator";
              return w;
            }
          }
        } else {
          const T dist2 = detail::utility_distance(utility, agg2, truth);
          if (arith<T>::strictly_less(dist2, base_dist, kImprovementTol)) {
            if (instances_out) *instances_out = instances;
            Witness w;
            w.grid = space.grid;
            for (int i : idx) w.profile.push_back(cdfs[i]);
            w.voter = v;
            w.deviation = cdfs[d];
            w.before = arith<T>::render(base_dist);
            w.after = arith<T>::render(dist2);
            w.note = utility.kind == Utility::Kind::lr_cdf
                         ? "deviation shrinks the L" + std::to_string(utility.r) +
                               " cdf distance (compared as the r-th power)"
                         : "deviation shrinks the L1 probability distance";
            return w;
          }
        }
      }
    }
  }
  if (instances_out) *instances_out = instances;
  return std::nullopt;
}

/// Recompute the before/after values a witness recorded. Audits promise the
/// replay reproduces the stored strings exactly in exact mode.
template <class T>
std::pair<std::string, std::string> replay_witness(const Method<T>& method,
                                                   const Utility& utility,
                                                   const Witness& w) {
  const int m = static_cast<int>(w.profile.at(0).size());
  const ScalePtr scale = OutcomeScale::indexed(m);
  const std::vector<T> weights =
      detail::audit_weights(method, static_cast<int>(w.profile.size()));
  std::vector<Cdf<T>> voters;
  for (const auto& nums : w.profile)
    voters.push_back(cdf_from_grid<T>(scale, nums, w.grid));
  Profile<T> prof(std::move(voters), weights);
  const Cdf<T> agg = aggregate(method, prof);
  const Profile<T> deviated =
      prof.with_voter(w.voter, cdf_from_grid<T>(scale, w.deviation, w.grid));
  const Cdf<T> agg2 = aggregate(method, deviated);
  if (utility.kind == Utility::Kind::level) {
    return {arith<T>::render(agg.cum()[w.grade]),
            arith<T>::render(agg2.cum()[w.grade])};
  }
  const Cdf<T>& truth = prof.voter(w.voter);
  return {arith<T>::render(detail::utility_distance(utility, agg, truth)),
          arith<T>::render(detail::utility_distance(utility, agg2, truth))};
}

/// Uncompromisingness at every level: no deviation moves the aggregate level
/// probability toward the deviating voter, at any grade.
template <class T>
AuditReport audit_level_sp(const Method<T>& method, const InstanceSpace& space) {
  AuditReport rep;
  rep.axiom = "level-sp";
  const auto w = find_manipulation(method, Utility::level(), space,
                                   &rep.instances_checked);
  rep.holds = !w.has_value();
  rep.witness = w;
  return rep;
}

/// No deviation strictly reduces the deviator's L_r distance to the
/// aggregate in CDF space.
template <class T>
AuditReport audit_lr_cdf_sp(const Method<T>& method, int r,
                            const InstanceSpace& space) {
  if (r < 1) throw DomainError("audit_lr_cdf_sp needs integer r >= 1");
  AuditReport rep;
  rep.axiom = "lr-cdf-sp:r=" + std::to_string(r);
  const auto w = find_manipulation(method, Utility::lr_cdf(r), space,
                                   &rep.instances_checked);
  rep.holds = !w.has_value();
  rep.witness = w;
  return rep;
}

/// No deviation strictly reduces the deviator's L1 distance to the aggregate
/// in probability space.
template <class T>
AuditReport audit_l1_prob_sp(const Method<T>& method,
                             const InstanceSpace& space) {
  AuditReport rep;
  rep.axiom = "l1-prob-sp";
  const auto w = find_manipulation(method, Utility::l1_prob(), space,
                                   &rep.instances_checked);
  rep.holds = !w.has_value();
  rep.witness = w;
  return rep;
}

namespace detail {

template <class T>
T interval_mass(const Cdf<T>& c, int lo, int hi) {
  return c.cum()[hi] - (lo > 0 ? c.cum()[lo - 1] : T(0));
}

template <class T, class Violates>
AuditReport audit_intervals(const char* axiom, const Method<T>& method,
                            const InstanceSpace& space, Violates&& violates) {
  const auto cdfs = enumerate_grid_cdfs(space.m, space.grid);
  detail::check_budget(space, cdfs.size());
  const ScalePtr scale = OutcomeScale::indexed(space.m);
  const std::vector<T> weights = detail::audit_weights(method, space.n);
  std::vector<Cdf<T>> pool;
  pool.reserve(cdfs.size());
  for (const auto& nums : cdfs)
    pool.push_back(cdf_from_grid<T>(scale, nums, space.grid));

  AuditReport rep;
  rep.axiom = axiom;
  detail::ProfileCursor cursor(space, cdfs.size());
  std::vector<int> idx;
  while (cursor.next(idx)) {
    ++rep.instances_checked;
    std::vector<Cdf<T>> voters;
    for (int i : idx) voters.push_back(pool[i]);
    Profile<T> prof(std::move(voters), weights);
    const Cdf<T> agg = aggregate(method, prof);
    for (int lo = 0; lo < space.m; ++lo) {
      for (int hi = lo; hi < space.m; ++hi) {
        std::vector<T> voter_mass(space.n);
        for (int i = 0; i < space.n; ++i)
          voter_mass[i] = interval_mass(prof.voter(i), lo, hi);
        const T agg_mass = interval_mass(agg, lo, hi);
        if (violates(voter_mass, agg_mass)) {
          rep.holds = false;
          Witness w;
          w.grid = space.grid;
          for (int i : idx) w.profile.push_back(cdfs[i]);
          w.grade = lo;
          w.grade2 = hi;
          w.after = arith<T>::render(agg_mass);
          rep.witness = std::move(w);
          return rep;
        }
      }
    }
  }
  return rep;
}

}  // namespace detail

/// Grade intervals every voter judges impossible stay impossible in the
/// aggregate.
template <class T>
AuditReport audit_certainty(const Method<T>& method,
                            const InstanceSpace& space) {
  auto rep = detail::audit_intervals(
      "certainty", method, space,
      [](const std::vector<T>& voters, const T& agg) {
        for (const T& v : voters)
          if (v != T(0)) return false;
        return agg != T(0);
      });
  if (rep.witness)
    rep.witness->note = "all voters flat on the interval but the aggregate moved";
  return rep;
}

/// Grade intervals every voter finds plausible keep positive mass in the
/// aggregate.
template <class T>
AuditReport audit_plausibility(const Method<T>& method,
                               const InstanceSpace& space) {
  auto rep = detail::audit_intervals(
      "plausibility", method, space,
      [](const std::vector<T>& voters, const T& agg) {
        for (const T& v : voters)
          if (!(v > T(0))) return false;
        return !(agg > T(0));
      });
  if (rep.witness)
    rep.witness->note =
        "all voters put positive mass on the interval, the aggregate none";
  return rep;
}

/// On every all-Dirac profile the aggregate must be the weighted mixture of
/// the voters' chosen grades, checked exactly. Enumerates all m^n grade
/// assignments.
template <class T>
AuditReport audit_proportionality(const Method<T>& method,
                                  const std::vector<T>& weights_in,
                                  const InstanceSpace& space) {
  const ScalePtr scale = OutcomeScale::indexed(space.m);
  const std::vector<T> w = normalized_weights(
      weights_in.empty() ? std::vector<T>(space.n, T(1)) : weights_in);
  if (w.size() != static_cast<size_t>(space.n))
    throw ProfileError("weight count does not match the space");

  long double total = 1;
  for (int i = 0; i < space.n; ++i) total *= space.m;
  if (total > static_cast<long double>(space.budget))
    throw BudgetExceeded("Dirac space exceeds the audit budget");

  AuditReport rep;
  rep.axiom = "proportionality";
  std::vector<int> assign(space.n, 0);
  bool done = false;
  while (!done) {
    ++rep.instances_checked;
    std::vector<Cdf<T>> voters;
    voters.reserve(space.n);
    for (int i = 0; i < space.n; ++i)
      voters.push_back(pmf_to_cdf(Pmf<T>::dirac(scale, assign[i])));
    Profile<T> prof(std::move(voters), w);
    const Pmf<T> got = cdf_to_pmf(aggregate(method, prof));

    std::vector<T> expected(space.m, T(0));
    for (int i = 0; i < space.n; ++i) expected[assign[i]] += w[i];
    bool match = true;
    for (int a = 0; a < space.m; ++a) {
      if (!arith<T>::near(got.mass()[a], expected[a], kMassTol)) {
        match = false;
        break;
      }
    }
    if (!match) {
      rep.holds = false;
      Witness wit;
      wit.grid = 1;
      for (int i = 0; i < space.n; ++i) {
        std::vector<int> nums(space.m, 1);
        for (int a = 0; a < assign[i]; ++a) nums[a] = 0;
        wit.profile.push_back(std::move(nums));
      }
      wit.note = "Dirac profile where the aggregate is not the weighted mixture";
      wit.after = "aggregate mass " + arith<T>::render(got.mass()[0]);
      rep.witness = std::move(wit);
      return rep;
    }

    int pos = space.n - 1;
    while (pos >= 0 && ++assign[pos] == space.m) {
      assign[pos] = 0;
      --pos;
    }
    done = pos < 0;
  }
  return rep;
}

/// Randomized scenarios for the four weighted-expert axioms of grading-curve
/// aggregation: merging same-input voters, rescaling all weights, swapping
/// equal-weight voters, and raising one voter's weight.
template <class T>
AuditReport audit_w_axioms(const GradingCurve<T>& curve, long long scenarios,
                           uint64_t seed) {
  AuditReport rep;
  rep.axiom = "w-axioms";
  std::mt19937_64 rng(seed);
  const auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % (hi - lo + 1));
  };

  for (long long s = 0; s < scenarios; ++s) {
    ++rep.instances_checked;
    const int n = pick(2, 4);
    const int m = pick(2, 4);
    const int grid = 6;
    const auto cdfs = enumerate_grid_cdfs(m, grid);
    const ScalePtr scale = OutcomeScale::indexed(m);

    std::vector<std::vector<int>> nums(n);
    std::vector<Cdf<T>> voters;
    for (int i = 0; i < n; ++i) {
      nums[i] = cdfs[rng() % cdfs.size()];
      voters.push_back(cdf_from_grid<T>(scale, nums[i], grid));
    }
    std::vector<T> w(n);
    for (int i = 0; i < n; ++i) w[i] = arith<T>::fraction(pick(1, 6), 6);

    const auto run = [&](const std::vector<Cdf<T>>& vs,
                         const std::vector<T>& ws) {
      return grading_curve_aggregate(curve, Profile<T>(vs, ws));
    };
    const Cdf<T> base = run(voters, w);

    const auto fail = [&](const std::string& which) {
      rep.holds = false;
      Witness wit;
      wit.grid = grid;
      wit.profile = nums;
      wit.note = which;
      rep.witness = std::move(wit);
    };

    {  // additivity: split voter 0 into two same-input voters
      std::vector<Cdf<T>> vs = voters;
      vs.insert(vs.begin(), voters[0]);
      std::vector<T> ws = w;
      const T part = w[0] * arith<T>::fraction(pick(1, 3), 4);
      ws.insert(ws.begin(), part);
      ws[1] = w[0] - part;
      if (!(run(vs, ws) == base)) {
        fail("w-additivity: splitting a voter changed the aggregate");
        return rep;
      }
    }
    {  // proportionality: rescale every weight
      std::vector<T> ws = w;
      const T k = arith<T>::fraction(pick(1, 5), pick(1, 5));
      for (T& v : ws) v *= k;
      if (!(run(voters, ws) == base)) {
        fail("w-proportionality: rescaling the weights changed the aggregate");
        return rep;
      }
    }
    {  // anonymity: equalize two weights, then swap the voters' inputs
      if (n >= 2) {
        const int i = pick(0, n - 2);
        const int j = pick(i + 1, n - 1);
        std::vector<T> ws = w;
        ws[j] = ws[i];
        std::vector<Cdf<T>> vs = voters;
        const Cdf<T> before = run(vs, ws);
        std::swap(vs[i], vs[j]);
        if (!(run(vs, ws) == before)) {
          fail("w-anonymity: swapping equal-weight voters changed the aggregate");
          return rep;
        }
      }
    }
    {  // monotonicity: raising w_i never moves the aggregate away from voter i
      const int i = pick(0, n - 1);
      std::vector<T> ws = w;
      ws[i] += arith<T>::fraction(pick(1, 6), 6);
      const Cdf<T> raised = run(voters, ws);
      for (int a = 0; a < m; ++a) {
        const T before = abs_diff(base.cum()[a], voters[i].cum()[a]);
        const T after = abs_diff(raised.cum()[a], voters[i].cum()[a]);
        if (after > before) {
          fail("w-monotonicity: more weight moved the aggregate away from the voter");
          return rep;
        }
      }
    }
  }
  return rep;
}

}  // namespace levelsp
