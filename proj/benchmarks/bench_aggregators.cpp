#include <benchmark/benchmark.h>

#include <random>
#include <span>
#include <vector>

#include "levelsp/levelsp.hpp"

using namespace levelsp;

namespace {

std::vector<double> random_levels(std::mt19937_64& rng, int n) {
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(rng() % 10001) / 10000.0;
  return out;
}

Profile<double> random_profile(std::mt19937_64& rng, int n, int m) {
  const ScalePtr s = OutcomeScale::indexed(m);
  std::vector<Cdf<double>> voters;
  for (int i = 0; i < n; ++i) {
    std::vector<double> cum(m);
    for (int j = 0; j + 1 < m; ++j) cum[j] = (rng() % 1001) / 1000.0;
    cum[m - 1] = 1.0;
    std::sort(cum.begin(), cum.end() - 1);
    voters.emplace_back(s, cum);
  }
  return Profile<double>::equal_weights(std::move(voters));
}

void BM_mu_w(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const std::vector<double> w(n, 1.0 / n);
  const auto levels = random_levels(rng, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mu_w(std::span<const double>(w), std::span<const double>(levels)));
  }
}
BENCHMARK(BM_mu_w)->Arg(5)->Arg(50)->Arg(500);

void BM_weighted_proportional(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto prof =
      random_profile(rng, static_cast<int>(state.range(0)), 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_proportional(prof));
  }
}
BENCHMARK(BM_weighted_proportional)->Arg(5)->Arg(50);

void BM_maxmin_level(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const auto sys = phantoms_from_weights(std::vector<double>(n, 1.0), 5);
  const auto levels = random_levels(rng, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        maxmin_level(sys, std::span<const double>(levels), 2));
  }
}
BENCHMARK(BM_maxmin_level)->Arg(4)->Arg(8)->Arg(12);

void BM_mj_compare(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto prof = random_profile(rng, 2, static_cast<int>(state.range(0)));
  const auto a = cdf_to_pmf(prof.voter(0));
  const auto b = cdf_to_pmf(prof.voter(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mj_compare(a, b));
  }
}
BENCHMARK(BM_mj_compare)->Arg(5)->Arg(20)->Arg(100);

void BM_level_sp_audit_exhaustive(benchmark::State& state) {
  InstanceSpace space;
  space.n = 2;
  space.m = 3;
  space.grid = static_cast<int>(state.range(0));
  const auto method = Method<Rational>::proportional();
  for (auto _ : state) {
    benchmark::DoNotOptimize(audit_level_sp(method, space));
  }
}
BENCHMARK(BM_level_sp_audit_exhaustive)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
