#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>
#include <span>

#include "levelsp/aggregators.hpp"
#include "levelsp/phantoms.hpp"
#include "levelsp/rational.hpp"

using namespace levelsp;

namespace {

Rational frac(long long n, long long d) { return Rational(n, d); }

AnonymousPhantoms<Rational> proportional_phantoms(int n, int m) {
  std::vector<std::vector<Rational>> fns(n + 1);
  for (int k = 0; k <= n; ++k) fns[k].assign(m, frac(k, n));
  return AnonymousPhantoms<Rational>(std::move(fns));
}

AnonymousPhantoms<Rational> order_phantoms(int k, int n, int m) {
  std::vector<std::vector<Rational>> fns(n + 1);
  for (int j = 0; j <= n; ++j)
    fns[j].assign(m, j <= n - k ? Rational(0) : Rational(1));
  return AnonymousPhantoms<Rational>(std::move(fns));
}

}  // namespace

TEST_CASE("validation accepts proportional phantoms") {
  CHECK(validate(proportional_phantoms(4, 3)).ok());
}

TEST_CASE("validation flags coalition monotonicity breaks") {
  // f_empty = 0.3 everywhere but f_{0} = 0.2: empty set exceeds a superset
  std::vector<std::vector<Rational>> fns(2);
  fns[0].assign(2, frac(3, 10));
  fns[1].assign(2, frac(1, 5));
  GeneralPhantoms<Rational> sys(1, std::move(fns));
  const auto diag = validate(sys);
  REQUIRE_FALSE(diag.ok());
  bool found = false;
  for (const auto& v : diag.violations) {
    if (v.kind == PhantomViolation::Kind::coalition_monotonicity &&
        v.subset == 0u && v.subset2 == 1u)
      found = true;
  }
  CHECK(found);
}

TEST_CASE("validation flags a top boundary away from 1") {
  std::vector<std::vector<Rational>> fns(3);
  fns[0].assign(2, Rational(0));
  fns[1].assign(2, frac(1, 2));
  fns[2].assign(2, frac(9, 10));  // f_n never reaches 1
  AnonymousPhantoms<Rational> sys(std::move(fns));
  const auto diag = validate(sys);
  REQUIRE_FALSE(diag.ok());
  CHECK(diag.violations.front().kind == PhantomViolation::Kind::boundary_top);
}

TEST_CASE("validation flags phantom functions that decrease over grades") {
  std::vector<std::vector<Rational>> fns(2);
  fns[0] = {Rational(0), Rational(0)};
  fns[1] = {Rational(1), frac(1, 2)};
  GeneralPhantoms<Rational> sys(1, std::move(fns));
  const auto diag = validate(sys);
  REQUIRE_FALSE(diag.ok());
  bool found = false;
  for (const auto& v : diag.violations)
    if (v.kind == PhantomViolation::Kind::not_monotone_in_grade) found = true;
  CHECK(found);
}

TEST_CASE("certainty preservation is constant unanimous phantoms") {
  CHECK(is_certainty_preserving(proportional_phantoms(3, 4)));

  // a strictly grade-increasing phantom function
  std::vector<std::vector<Rational>> fns(3);
  fns[0].assign(3, Rational(0));
  fns[1] = {frac(1, 4), frac(1, 2), frac(3, 4)};
  fns[2].assign(3, Rational(1));
  CHECK_FALSE(is_certainty_preserving(AnonymousPhantoms<Rational>(std::move(fns))));

  // constants but not unanimous: f_empty stuck at 0.1
  std::vector<std::vector<Rational>> fns2(3);
  fns2[0].assign(3, frac(1, 10));
  fns2[1].assign(3, frac(1, 2));
  fns2[2].assign(3, Rational(1));
  CHECK_FALSE(is_certainty_preserving(AnonymousPhantoms<Rational>(std::move(fns2))));
}

TEST_CASE("plausibility preservation: 0/1 phantoms pass, interior constants fail") {
  CHECK(is_plausibility_preserving(order_phantoms(2, 3, 3)));
  CHECK_FALSE(is_plausibility_preserving(proportional_phantoms(3, 3)));

  // f_n worth 0 on the first grade
  std::vector<std::vector<Rational>> fns(2);
  fns[0] = {Rational(0), Rational(0)};
  fns[1] = {Rational(0), Rational(1)};
  CHECK_FALSE(is_plausibility_preserving(AnonymousPhantoms<Rational>(std::move(fns))));
}

TEST_CASE("weak diversity needs strictly increasing constant phantoms") {
  CHECK(is_weak_diversity(
      phantoms_from_weights<Rational>({frac(3, 10), frac(1, 2), frac(1, 5)}, 3)));
  CHECK_FALSE(is_weak_diversity(order_phantoms(2, 3, 3)));
  CHECK_FALSE(is_weak_diversity(
      phantoms_from_weights<Rational>({frac(1, 2), frac(1, 2), Rational(0)}, 3)));
}

TEST_CASE("phantoms_from_weights sums coalition weights") {
  const auto sys = phantoms_from_weights<Rational>(
      {frac(3, 10), frac(1, 2), frac(1, 5)}, 2);
  CHECK(sys.value(0b011, 0) == frac(4, 5));
  CHECK(sys.value(0b000, 1) == Rational(0));
  CHECK(sys.value(0b111, 0) == Rational(1));

  // equal weights are the proportional constants 0, 1/3, 2/3, 1
  const auto eq = phantoms_from_weights<Rational>({1, 1, 1}, 2);
  CHECK(eq.value(0b001, 0) == frac(1, 3));
  CHECK(eq.value(0b110, 1) == frac(2, 3));

  // a single voter is their own dictator
  const auto solo = phantoms_from_weights<Rational>({frac(2, 5)}, 3);
  CHECK(solo.value(0, 0) == Rational(0));
  CHECK(solo.value(1, 2) == Rational(1));

  CHECK_THROWS_AS(phantoms_from_weights<Rational>({0, 0}, 2), InvalidWeights);
}

TEST_CASE("identity grading curve reproduces the weight phantoms exactly") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 4);
    std::vector<Rational> w(n);
    bool nonzero = false;
    for (auto& v : w) {
      v = frac(static_cast<long long>(rng() % 7), 6);
      if (v > Rational(0)) nonzero = true;
    }
    if (!nonzero) w[0] = Rational(1);
    const auto direct = phantoms_from_weights(w, m);
    const auto via_curve =
        phantoms_from_grading_curve(GradingCurve<Rational>::identity(), w, m);
    for (unsigned mask = 0; mask < unsigned(direct.coalitions()); ++mask)
      CHECK(direct.of(mask) == via_curve.of(mask));
  }
}

TEST_CASE("majority step curve yields middlemost phantoms for equal weights") {
  const auto sys = phantoms_from_grading_curve(
      GradingCurve<Rational>::step(frac(1, 2)), std::vector<Rational>{1, 1, 1},
      2);
  for (unsigned mask = 0; mask < 8u; ++mask) {
    const int size = std::popcount(mask);
    CHECK(sys.value(mask, 0) == (size >= 2 ? Rational(1) : Rational(0)));
  }
}

TEST_CASE("curves must reach 1 at the top") {
  CHECK_THROWS_AS(GradingCurve<Rational>::affine(frac(1, 2), Rational(0)),
                  InvalidCurve);
  CHECK_NOTHROW(GradingCurve<Rational>::affine(frac(1, 2), frac(1, 2)));
  CHECK_THROWS_AS(GradingCurve<Rational>::step(Rational(0)), InvalidCurve);
  CHECK_THROWS_AS(
      GradingCurve<Rational>::table({{{Rational(0), Rational(0)},
                                      {Rational(1), frac(9, 10)}}}),
      InvalidCurve);
}

TEST_CASE("table curves interpolate monotonically and validate shape") {
  const auto curve = GradingCurve<Rational>::table(
      {{{Rational(0), Rational(0)}, {frac(1, 2), frac(1, 4)}, {Rational(1), frac(1, 2)}},
       {{Rational(0), frac(1, 4)}, {frac(1, 2), frac(1, 2)}, {Rational(1), Rational(1)}}});
  CHECK(curve.eval(0, frac(1, 4)) == frac(1, 8));
  CHECK(curve.eval(1, frac(3, 4)) == frac(3, 4));
  // decreasing across grades is rejected
  CHECK_THROWS_AS(GradingCurve<Rational>::table(
                      {{{Rational(0), frac(1, 2)}, {Rational(1), Rational(1)}},
                       {{Rational(0), Rational(0)}, {Rational(1), Rational(1)}}}),
                  InvalidCurve);
}

TEST_CASE("anonymous medians equal the induced general max-min everywhere") {
  // exhaustive small check of the coalition-size correspondence
  const int n = 3, m = 2, grid = 3;
  std::vector<std::vector<Rational>> fns(n + 1);
  fns[0] = {Rational(0), Rational(0)};
  fns[1] = {frac(1, 4), frac(1, 3)};
  fns[2] = {frac(1, 2), frac(2, 3)};
  fns[3] = {Rational(1), Rational(1)};
  const AnonymousPhantoms<Rational> anon(fns);
  const auto general = anon.induced_general();
  REQUIRE(validate(anon).ok());
  REQUIRE(validate(general).ok());

  std::vector<Rational> levels(n);
  std::vector<int> idx(n, 0);
  bool done = false;
  while (!done) {
    for (int a = 0; a < m; ++a) {
      for (int i = 0; i < n; ++i) levels[i] = frac(idx[i], grid);
      CHECK(median_level(anon, std::span<const Rational>(levels), a) ==
            maxmin_level(general, std::span<const Rational>(levels), a));
    }
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] > grid) idx[pos--] = 0;
    done = pos < 0;
  }
}
