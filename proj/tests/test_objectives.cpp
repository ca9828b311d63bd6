#include <doctest.h>

#include <cmath>
#include <vector>

#include "binsplit/errors.hpp"
#include "binsplit/objectives.hpp"

using namespace binsplit;

TEST_CASE("f1 and f2 values") {
  const std::vector<double> c{0.5};
  CHECK(eval_f1(std::vector<double>{-0.5}, c) == 0.0);
  CHECK(eval_f1(std::vector<double>{0.5}, c) == doctest::Approx(10.0));
  CHECK(eval_f2(std::vector<double>{0.0}, c) == doctest::Approx(5.0));
  CHECK(eval_f2(std::vector<double>{0.5}, c) == 0.0);
  CHECK(eval_f2(std::vector<double>{-0.5}, c) == 0.0);

  const std::vector<double> c2{0.5, 0.25};
  const std::vector<double> x{0.3, -0.7};
  const std::vector<double> mx{-0.3, 0.7};
  CHECK(eval_f2(x, c2) == doctest::Approx(eval_f2(mx, c2)));
  CHECK(eval_f2(x, c2, Norm::sup) == doctest::Approx(eval_f2(mx, c2, Norm::sup)));
  // sup norm: min(max(0.2, 0.95), max(0.8, 0.45)) = 0.8
  CHECK(eval_f2(x, c2, Norm::sup) == doctest::Approx(8.0));
  CHECK(eval_f1(x, c2) == doctest::Approx(10.0 * (0.8 * 0.8 + 0.45 * 0.45)));
}

TEST_CASE("make_objective registry") {
  const DecisionSpace space = DecisionSpace::cube(2, -1.0, 1.0, 0.5);
  ObjectiveSpec spec;
  spec.name = "f1";
  spec.dim = 2;
  const Objective f1 = make_objective(spec, space);
  REQUIRE(f1.assumption());
  CHECK(f1.assumption()->alpha == 2.0);
  CHECK(f1.assumption()->beta == 1.0);
  CHECK(f1.optimum_value() == 0.0);
  CHECK(f1(std::vector<double>{-0.5, -0.5}) == 0.0);
  CHECK_THROWS_AS((void)f1(std::vector<double>{0.0}), ConfigError);

  spec.name = "f2";
  const Objective f2 = make_objective(spec, space);
  CHECK(f2.assumption()->alpha == 1.0);
  CHECK(f2.assumption()->beta == 2.0);

  spec.name = "step";
  spec.threshold = 0.0;
  spec.gap = 0.75;
  const Objective step = make_objective(spec, space);
  CHECK(step(std::vector<double>{-0.1, 0.9}) == 0.0);
  CHECK(step(std::vector<double>{0.0, 0.9}) == 0.75);

  spec.name = "nope";
  CHECK_THROWS_AS((void)make_objective(spec, space), ConfigError);
}

TEST_CASE("noisy_observe moments") {
  const DecisionSpace space = DecisionSpace::cube(1, -1.0, 1.0, 0.5);
  ObjectiveSpec spec;
  const Objective f = make_objective(spec, space);
  const std::vector<double> x{0.0};
  Rng rng(42);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = noisy_observe(f, space, x, NoiseModel{1.0}, rng);
    sum += y;
    sq += y * y;
  }
  const double m = sum / n;
  const double var = sq / n - m * m;
  CHECK(std::abs(m - 2.5) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("noisy_observe with zero scale and determinism") {
  const DecisionSpace space = DecisionSpace::cube(1, -1.0, 1.0, 0.5);
  const Objective f = make_objective(ObjectiveSpec{}, space);
  Rng rng(1);
  CHECK(noisy_observe(f, space, std::vector<double>{0.5}, NoiseModel{0.0}, rng) == doctest::Approx(10.0));
  Rng a(9);
  Rng b(9);
  for (int i = 0; i < 100; ++i) {
    CHECK(noisy_observe(f, space, std::vector<double>{0.1}, NoiseModel{1.0}, a) ==
          noisy_observe(f, space, std::vector<double>{0.1}, NoiseModel{1.0}, b));
  }
}

TEST_CASE("noisy_observe domain") {
  const DecisionSpace space = DecisionSpace::cube(1, -1.0, 1.0, 0.5);
  const Objective f = make_objective(ObjectiveSpec{}, space);
  Rng rng(1);
  CHECK_NOTHROW((void)noisy_observe(f, space, std::vector<double>{1.5}, NoiseModel{}, rng));
  CHECK_THROWS_AS((void)noisy_observe(f, space, std::vector<double>{1.6}, NoiseModel{}, rng), DomainError);
}

TEST_CASE("beta bound") {
  CHECK(check_beta_bound(2.0, 0.5, 1).ok);
  CHECK(check_beta_bound(2.0, 1.0, 2).ok);
  CHECK_FALSE(check_beta_bound(2.0, 3.0, 2).ok);
  CHECK(check_beta_bound(2.0, 3.0, 2).bound == 1.0);
  CHECK(check_beta_bound(1.0, 3.0, 3).ok);
  CHECK(check_beta_bound(1.0, 3.0 + 1e-13, 3).ok);
  CHECK_THROWS_AS(require_beta_bound(2.0, 3.0, 2), GuardViolation);
}

TEST_CASE("estimate_smoothness") {
  const DecisionSpace space = DecisionSpace::cube(1, -1.0, 1.0, 0.5);
  Rng rng(17);

  ObjectiveSpec cs;
  cs.name = "constant";
  cs.value = 3.0;
  CHECK(estimate_smoothness(make_objective(cs, space), 2.0, space, rng) < 1e-9);

  const Objective f1 = make_objective(ObjectiveSpec{}, space);
  const double m1 = estimate_smoothness(f1, 2.0, space, rng);
  CHECK(std::abs(m1 - 10.0 / 12.0) < 0.1 * 10.0 / 12.0);

  ObjectiveSpec s2;
  s2.name = "f2";
  const Objective f2 = make_objective(s2, space);
  const double m2 = estimate_smoothness(f2, 1.0, space, rng);
  CHECK(std::isfinite(m2));
  CHECK(m2 > 0.0);
  CHECK(m2 < 10.0);

  // At alpha = 2 the kink makes the ratio grow as the ladder goes deeper.
  SmoothnessOptions shallow;
  shallow.samples = 2000;
  shallow.ladder_levels = 3;
  SmoothnessOptions deep = shallow;
  deep.ladder_levels = 10;
  Rng r1(5);
  Rng r2(5);
  const double lo = estimate_smoothness(f2, 2.0, space, r1, shallow);
  const double hi = estimate_smoothness(f2, 2.0, space, r2, deep);
  CHECK(hi > 4.0 * lo);

  SmoothnessOptions bad;
  bad.samples = 50;
  CHECK_THROWS_AS((void)estimate_smoothness(f1, 2.0, space, rng, bad), ConfigError);
}

TEST_CASE("estimate_beta") {
  const std::vector<double> ladder{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const DecisionSpace s1 = DecisionSpace::cube(1, -1.0, 1.0, 0.5);
  const Objective f1 = make_objective(ObjectiveSpec{}, s1);
  CHECK(std::abs(estimate_beta(f1, s1, 1.0 / 4096.0, ladder) - 0.5) < 0.15);

  const DecisionSpace s2 = DecisionSpace::cube(2, -1.0, 1.0, 0.5);
  ObjectiveSpec f2s;
  f2s.name = "f2";
  f2s.dim = 2;
  const Objective f2 = make_objective(f2s, s2);
  // Sublevel disks shrink like eps / 10, so keep them several cells across.
  const std::vector<double> coarse{1.0, 0.5, 0.25, 0.125, 0.0625};
  CHECK(std::abs(estimate_beta(f2, s2, 1.0 / 512.0, coarse) - 2.0) < 0.15);

  ObjectiveSpec f2d1;
  f2d1.name = "f2";
  const Objective f21 = make_objective(f2d1, s1);
  CHECK(std::abs(estimate_beta(f21, s1, 1.0 / 4096.0, ladder) - 1.0) < 0.15);

  ObjectiveSpec cs;
  cs.name = "constant";
  CHECK_THROWS_AS((void)estimate_beta(make_objective(cs, s1), s1, 1.0 / 64.0, ladder), InsufficientData);

  const std::vector<double> rising{0.1, 0.2, 0.4};
  CHECK_THROWS_AS((void)estimate_beta(f1, s1, 1.0 / 64.0, rising), ConfigError);
}
