#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levelsp/aggregators.hpp"
#include "levelsp/audits.hpp"
#include "levelsp/distribution.hpp"

namespace levelsp {

// ---------------------------------------------------------------------------
// Classic majority values (equal-weight Dirac ballots)

/// Majority value of a grade multiset: sort descending, then fan out from
/// the middle. Odd count starts below the middle, even count starts above.
/// The first entry is the majority grade; lexicographic comparison of two
/// such sequences is the classic MJ ranking.
inline std::vector<int> majority_value(std::vector<int> grades) {
  if (grades.empty()) throw DomainError("majority value of an empty multiset");
  std::sort(grades.begin(), grades.end(), std::greater<int>());
  const int n = static_cast<int>(grades.size());
  // 1-based positions into the descending sort
  const int t = n % 2 == 1 ? (n + 1) / 2 : (n + 2) / 2;
  std::vector<int> out;
  out.reserve(n);
  out.push_back(grades[t - 1]);
  const int first_step = n % 2 == 1 ? +1 : -1;
  for (int d = 1; static_cast<int>(out.size()) < n; ++d) {
    for (int sign : {first_step, -first_step}) {
      const int pos = t + sign * d;
      if (pos >= 1 && pos <= n) out.push_back(grades[pos - 1]);
      if (static_cast<int>(out.size()) == n) break;
    }
  }
  return out;
}

/// Lexicographic order on majority values: positive if a ranks above b.
inline int compare_majority_values(const std::vector<int>& a,
                                   const std::vector<int>& b) {
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  if (a.size() != b.size())
    throw DomainError("majority values of different lengths");
  return 0;
}

// ---------------------------------------------------------------------------
// The distribution comparator

enum class MjOrdering { a_below, equal, a_above };

/// Diagnostic record of one comparison: the sup/inf pair around the median
/// quantile, which side was selected, and the two quantile grades that
/// decided the outcome.
template <class T>
struct MjTrace {
  T a{0};
  T b{1};
  T c{0};
  bool c_is_b = false;
  bool b_attained = false;
  int grade_a = -1;  // deviating quantile of A at the critical point
  int grade_b = -1;  // deviating quantile of B at the critical point
};

/// Rank two distributions on a shared finite scale the MJ way.
///
/// The quantile functions are step functions with breakpoints in the images
/// of the two CDFs, so the set where they disagree is a finite union of
/// left-open right-closed intervals. a is the supremum of disagreement at or
/// below 1/2 (attained whenever nonzero); b the infimum at or above 1/2,
/// possibly unattained, in which case the comparison at b reads the values
/// just to its right. When the two distances from 1/2 tie with b != 1/2, the
/// a side is used (the algorithm's else branch).
template <class T>
MjOrdering mj_compare(const Pmf<T>& pa, const Pmf<T>& pb,
                      MjTrace<T>* trace_out = nullptr) {
  require_same_scale(pa.scale(), pb.scale(), "mj_compare");
  if (pa.mass() == pb.mass()) {
    if (trace_out) *trace_out = MjTrace<T>{};
    return MjOrdering::equal;
  }
  const Cdf<T> ca = pmf_to_cdf(pa);
  const Cdf<T> cb = pmf_to_cdf(pb);
  const T half = arith<T>::fraction(1, 2);

  std::vector<T> bp;
  bp.push_back(T(0));
  bp.push_back(half);
  bp.push_back(T(1));
  for (const T& v : ca.cum()) bp.push_back(v);
  for (const T& v : cb.cum()) bp.push_back(v);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  while (!bp.empty() && bp.front() < T(0)) bp.erase(bp.begin());

  struct Segment {
    T lo, hi;
    int qa, qb;
  };
  std::vector<Segment> diff;
  for (size_t k = 1; k < bp.size(); ++k) {
    if (!(bp[k - 1] < bp[k])) continue;
    const int qa = quantile(ca, bp[k]);
    const int qb = quantile(cb, bp[k]);
    if (qa != qb) diff.push_back({bp[k - 1], bp[k], qa, qb});
  }
  // identical quantile functions would mean identical distributions
  if (diff.empty())
    throw Error("internal: distributions differ but quantiles agree");

  T a(0);
  int seg_a = -1;
  for (size_t s = 0; s < diff.size(); ++s) {
    if (!(diff[s].lo < half)) continue;
    const T cand = std::min(diff[s].hi, half);
    if (seg_a < 0 || a < cand) {
      a = cand;
      seg_a = static_cast<int>(s);
    }
  }
  T b(1);
  int seg_b = -1;
  bool b_attained = false;
  for (size_t s = 0; s < diff.size(); ++s) {
    if (!(diff[s].hi >= half)) continue;
    const T cand = std::max(diff[s].lo, half);
    const bool attained = cand > diff[s].lo;
    if (seg_b < 0 || cand < b || (cand == b && attained && !b_attained)) {
      b = cand;
      seg_b = static_cast<int>(s);
      b_attained = attained;
    }
  }

  const bool choose_b = (seg_b >= 0 && b - half < half - a) || b == half;
  const int seg = choose_b ? seg_b : seg_a;
  if (seg < 0) throw Error("internal: mj_compare found no critical segment");

  if (trace_out) {
    trace_out->a = a;
    trace_out->b = b;
    trace_out->c = choose_b ? b : a;
    trace_out->c_is_b = choose_b;
    trace_out->b_attained = b_attained;
    trace_out->grade_a = diff[seg].qa;
    trace_out->grade_b = diff[seg].qb;
  }
  return diff[seg].qa < diff[seg].qb ? MjOrdering::a_below : MjOrdering::a_above;
}

// ---------------------------------------------------------------------------
// Elections

/// An MJU election: per voter and candidate one probability ballot on a
/// shared scale. Classic MJ ballots are the all-Dirac special case.
template <class T>
class Election {
 public:
  Election(ScalePtr scale, std::vector<std::string> candidates,
           std::vector<std::string> voter_ids, std::vector<T> weights,
           std::vector<std::vector<Pmf<T>>> ballots)
      : scale_(std::move(scale)),
        candidates_(std::move(candidates)),
        voter_ids_(std::move(voter_ids)),
        weights_(std::move(weights)),
        ballots_(std::move(ballots)) {
    if (candidates_.empty()) throw ProfileError("election needs candidates");
    if (voter_ids_.empty()) throw ProfileError("election needs voters");
    if (weights_.size() != voter_ids_.size())
      throw ProfileError("one weight per voter required");
    if (ballots_.size() != voter_ids_.size())
      throw ProfileError("one ballot row per voter required");
    T sum(0);
    for (const T& w : weights_) {
      if (w < T(0)) throw InvalidWeights("negative voter weight");
      sum += w;
    }
    if (!(sum > T(0))) throw InvalidWeights("election weights are all zero");
    for (const auto& row : ballots_) {
      if (row.size() != candidates_.size())
        throw ProfileError("ballot row is missing a candidate entry");
      for (const auto& pmf : row)
        require_same_scale(pmf.scale(), *scale_, "Election");
    }
  }

  const ScalePtr& scale_ptr() const { return scale_; }
  const OutcomeScale& scale() const { return *scale_; }
  const std::vector<std::string>& candidates() const { return candidates_; }
  const std::vector<std::string>& voter_ids() const { return voter_ids_; }
  const std::vector<T>& weights() const { return weights_; }
  int voters() const { return static_cast<int>(voter_ids_.size()); }
  const Pmf<T>& ballot(int voter, int candidate) const {
    return ballots_.at(voter).at(candidate);
  }

  /// All ballots for one candidate assembled into a weighted profile.
  Profile<T> candidate_profile(int candidate) const {
    std::vector<Cdf<T>> voters;
    voters.reserve(voter_ids_.size());
    for (size_t v = 0; v < voter_ids_.size(); ++v)
      voters.push_back(pmf_to_cdf(ballots_[v][candidate]));
    return Profile<T>(std::move(voters), weights_);
  }

  Election with_ballot(int voter, int candidate, Pmf<T> replacement) const {
    auto ballots = ballots_;
    ballots.at(voter).at(candidate) = std::move(replacement);
    return Election(scale_, candidates_, voter_ids_, weights_,
                    std::move(ballots));
  }

 private:
  ScalePtr scale_;
  std::vector<std::string> candidates_;
  std::vector<std::string> voter_ids_;
  std::vector<T> weights_;
  std::vector<std::vector<Pmf<T>>> ballots_;
};

template <class T>
struct RankedCandidate {
  std::string label;
  Pmf<T> aggregate;
  Cdf<T> aggregate_cdf;
  int majority_grade;  // grade index of the aggregate's median quantile
  int tie_class;       // candidates sharing a class are exactly tied
};

template <class T>
struct PairTrace {
  std::string first;
  std::string second;
  MjOrdering ordering;
  MjTrace<T> trace;
};

template <class T>
struct Ranking {
  std::vector<RankedCandidate<T>> order;   // best first
  std::vector<PairTrace<T>> adjacent;      // traces for adjacent ranked pairs
};

/// Aggregate every candidate with the weighted-proportional-cumulative and
/// rank the aggregates with the distribution comparator. The comparator is a
/// total preorder on finite scales; the tally recomputes all pairs and
/// asserts transitivity outright, so a violation is an internal bug, never
/// an input property.
template <class T>
Ranking<T> mju_tally(const Election<T>& e) {
  const int mcount = static_cast<int>(e.candidates().size());
  std::vector<Pmf<T>> agg;
  std::vector<Cdf<T>> agg_cdf;
  agg.reserve(mcount);
  for (int c = 0; c < mcount; ++c) {
    Cdf<T> out = weighted_proportional(e.candidate_profile(c));
    agg.push_back(cdf_to_pmf(out));
    agg_cdf.push_back(std::move(out));
  }

  std::vector<std::vector<MjOrdering>> ord(mcount,
                                           std::vector<MjOrdering>(mcount));
  std::vector<std::vector<MjTrace<T>>> traces(
      mcount, std::vector<MjTrace<T>>(mcount));
  for (int i = 0; i < mcount; ++i) {
    for (int j = 0; j < mcount; ++j) {
      if (i == j) {
        ord[i][j] = MjOrdering::equal;
        continue;
      }
      ord[i][j] = mj_compare(agg[i], agg[j], &traces[i][j]);
    }
  }
  for (int i = 0; i < mcount; ++i) {
    for (int j = 0; j < mcount; ++j) {
      if (i == j) continue;
      const bool anti =
          (ord[i][j] == MjOrdering::equal && ord[j][i] == MjOrdering::equal) ||
          (ord[i][j] == MjOrdering::a_above && ord[j][i] == MjOrdering::a_below) ||
          (ord[i][j] == MjOrdering::a_below && ord[j][i] == MjOrdering::a_above);
      if (!anti)
        throw TransitivityViolation("mj comparisons are not antisymmetric");
      for (int k = 0; k < mcount; ++k) {
        if (k == i || k == j) continue;
        const bool ij = ord[i][j] != MjOrdering::a_below;
        const bool jk = ord[j][k] != MjOrdering::a_below;
        const bool strict = ord[i][j] == MjOrdering::a_above ||
                            ord[j][k] == MjOrdering::a_above;
        if (ij && jk) {
          if (ord[i][k] == MjOrdering::a_below ||
              (strict && ord[i][k] != MjOrdering::a_above))
            throw TransitivityViolation("mj comparisons are not transitive");
        }
      }
    }
  }

  std::vector<int> by_rank(mcount);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::stable_sort(by_rank.begin(), by_rank.end(), [&](int x, int y) {
    return ord[x][y] == MjOrdering::a_above;
  });

  Ranking<T> ranking;
  const T half = arith<T>::fraction(1, 2);
  int tie_class = 0;
  for (size_t pos = 0; pos < by_rank.size(); ++pos) {
    const int c = by_rank[pos];
    if (pos > 0 && ord[by_rank[pos - 1]][c] != MjOrdering::equal) ++tie_class;
    ranking.order.push_back({e.candidates()[c], agg[c], agg_cdf[c],
                             quantile(agg_cdf[c], half), tie_class});
    if (pos > 0) {
      const int prev = by_rank[pos - 1];
      ranking.adjacent.push_back({e.candidates()[prev], e.candidates()[c],
                                  ord[prev][c], traces[prev][c]});
    }
  }
  return ranking;
}

// ---------------------------------------------------------------------------
// Partial strategyproofness of the ranking

/// For a two-candidate election where the leader A holds a strictly higher
/// society majority grade and the probing voter's ballot for the trailer B
/// stochastically dominates their ballot for A, no single voter may be able
/// to both raise B's majority grade and lower A's. Deviations range over the
/// grid CDF space. One-directional abilities are legal and reported.
template <class T>
AuditReport partial_sp_ranking_check(const Election<T>& e,
                                     const Method<T>& method, int grid) {
  if (e.candidates().size() != 2)
    throw PreconditionUnmet("ranking check expects exactly two candidates");
  const T half = arith<T>::fraction(1, 2);

  const auto majority_grade_of = [&](int candidate,
                                     std::optional<std::pair<int, Cdf<T>>>
                                         replace) {
    Profile<T> prof = e.candidate_profile(candidate);
    if (replace) prof = prof.with_voter(replace->first, replace->second);
    return quantile(aggregate(method, prof), half);
  };

  const int mA0 = majority_grade_of(0, std::nullopt);
  const int mB0 = majority_grade_of(1, std::nullopt);
  const int A = mA0 > mB0 ? 0 : 1;
  const int B = 1 - A;
  const int mA = std::max(mA0, mB0);
  const int mB = std::min(mA0, mB0);
  if (mA == mB)
    throw PreconditionUnmet("candidates share the society majority grade");

  std::vector<int> probers;
  for (int v = 0; v < e.voters(); ++v) {
    // ballot for B first-order dominates ballot for A: cdf(B) <= cdf(A)
    if (dominates(pmf_to_cdf(e.ballot(v, A)), pmf_to_cdf(e.ballot(v, B))))
      probers.push_back(v);
  }
  if (probers.empty())
    throw PreconditionUnmet(
        "no voter's ballot for the trailer dominates their ballot for the leader");

  const auto cdfs = enumerate_grid_cdfs(e.scale().size(), grid);
  AuditReport rep;
  rep.axiom = "partial-sp-ranking";
  for (int v : probers) {
    std::optional<std::vector<int>> raise_b;
    std::optional<std::vector<int>> lower_a;
    for (const auto& nums : cdfs) {
      const Cdf<T> dev = cdf_from_grid<T>(e.scale_ptr(), nums, grid);
      if (!raise_b && majority_grade_of(B, {{v, dev}}) > mB) raise_b = nums;
      if (!lower_a && majority_grade_of(A, {{v, dev}}) < mA) lower_a = nums;
      if (raise_b && lower_a) break;
    }
    ++rep.instances_checked;
    if (raise_b && lower_a) {
      rep.holds = false;
      Witness w;
      w.grid = grid;
      w.voter = v;
      w.deviation = *raise_b;
      w.deviation2 = *lower_a;
      w.note = "voter can raise the trailer's majority grade and lower the leader's";
      rep.witness = std::move(w);
      return rep;
    }
    if (raise_b)
      rep.note += "voter " + std::to_string(v) + " can raise the trailer; ";
    if (lower_a)
      rep.note += "voter " + std::to_string(v) + " can lower the leader; ";
  }
  if (rep.note.empty()) rep.note = "no single-direction ability found";
  return rep;
}

// ---------------------------------------------------------------------------
// Referendum extension

template <class T>
struct ReferendumResult {
  T aggregate;
  bool reform;
  std::vector<T> multiset;  // the sorted median pool, for transparency
};

/// Aggregate per-voter reform probabilities with the proportional-cumulative
/// one-shot rule (median against the uniform phantom ladder) and apply the
/// decision threshold.
template <class T>
ReferendumResult<T> referendum(std::span<const T> priors, const T& alpha) {
  if (priors.empty()) throw DomainError("referendum needs at least one prior");
  if (!(alpha > T(0)) || !(alpha < T(1)))
    throw ConfigError("threshold must lie strictly between 0 and 1");
  const long long n = static_cast<long long>(priors.size());
  std::vector<T> pool;
  pool.reserve(2 * n + 1);
  for (const T& p : priors) {
    if (p < T(0) || p > T(1))
      throw InvalidDistribution("prior outside [0,1]");
    pool.push_back(p);
  }
  for (long long j = 0; j <= n; ++j)
    pool.push_back(arith<T>::fraction(j, n));
  std::sort(pool.begin(), pool.end());
  const T p = pool[n];
  return {p, p > alpha, std::move(pool)};
}

}  // namespace levelsp
