#include <cmath>
#include <random>

#include "doctest.h"
#include "instances.hpp"
#include "oracles.hpp"

using namespace jurymech;

TEST_CASE("from_payoffs converts to thresholds") {
  const auto p2 = ModelParams::from_payoffs(2, 0.5, 2.0 / 3.0, 1.0 / 3.0, 1.0, -1.5, 1.0, -0.5);
  CHECK(p2.t_P() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(p2.t_J() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p2.has_payoffs());

  const auto p9 = ModelParams::from_payoffs(9, 0.5, 2.0 / 3.0, 1.0 / 3.0, 2.0, -2.0, 1.0, -0.05);
  CHECK(p9.t_P() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p9.t_J() == doctest::Approx(0.05).epsilon(1e-15));

  CHECK_THROWS_AS(ModelParams::from_payoffs(2, 0.5, 2.0 / 3.0, 1.0 / 3.0, -1.0, 1.0, 1.0, -0.5),
                  std::invalid_argument);
}

TEST_CASE("domain checks") {
  CHECK_THROWS_AS(ModelParams::unvalidated(1, 0.5, 0.6, 0.4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::unvalidated(3, 0.0, 0.6, 0.4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::unvalidated(3, 0.5, 0.4, 0.6, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::unvalidated(3, 0.5, 0.6, 0.4, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("likelihood on the fixtures") {
  const auto p9 = fixtures::f9();
  CHECK(likelihood(p9, 5) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(likelihood(p9, 3) == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(likelihood(fixtures::f2(), 1) == doctest::Approx(1.0).epsilon(1e-13));

  const auto e9 = fixtures::f9_exact();
  CHECK(likelihood(e9, 5) == Rational(2));
  CHECK(likelihood(e9, 3) == Rational(1, 8));
  CHECK(likelihood(e9, 0) == Rational(1, 512));
}

TEST_CASE("likelihood matches direct powers") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n1 = 2 + static_cast<int>(rng() % 30);
    const double pb = 0.05 + 0.5 * u(rng);
    const double pa = pb + 0.05 + (0.94 - pb) * u(rng);
    const auto p = ModelParams::unvalidated(n1, 0.1 + 0.8 * u(rng), pa, pb, 1.0, 1.0);
    for (int k = 0; k <= n1; ++k)
      CHECK(likelihood(p, k) == doctest::Approx(oracle::likelihood(p, k)).epsilon(1e-12));
  }
}

TEST_CASE("cutoffs") {
  const auto p9 = fixtures::f9();
  CHECK(cutoff(p9, 0.05) == 3);
  CHECK(cutoff(p9, 1.0) == 5);
  CHECK(agent_cutoff(p9) == 3);
  CHECK(principal_cutoff(p9) == 5);
  CHECK(cutoff(fixtures::f2(), 0.5) == 1);
  CHECK(cutoff(fixtures::f9_exact(), Rational(1, 20)) == 3);
  CHECK_THROWS_AS(cutoff(p9, 1000.0), PartisanThresholdError);
  CHECK_THROWS_AS(cutoff(p9, 1e-4), PartisanThresholdError);
}

TEST_CASE("assumption checks") {
  CHECK(validate_assumptions(fixtures::f2()).ok());

  const auto indifferent = ModelParams::unvalidated(2, 0.5, 2.0 / 3.0, 1.0 / 3.0, 1.5, 1.0);
  const auto r3 = validate_assumptions(indifferent);
  CHECK_FALSE(r3.a3_no_indifference);
  CHECK(r3.a1_ordering);
  CHECK_THROWS_AS(ModelParams::from_thresholds(2, 0.5, 2.0 / 3.0, 1.0 / 3.0, 1.5, 1.0), AssumptionError);

  const auto reversed = ModelParams::unvalidated(2, 0.5, 2.0 / 3.0, 1.0 / 3.0, 0.1, 0.2);
  CHECK_FALSE(validate_assumptions(reversed).a1_ordering);

  const auto partisan = ModelParams::unvalidated(2, 0.5, 2.0 / 3.0, 1.0 / 3.0, 5.0, 0.5);
  CHECK_FALSE(validate_assumptions(partisan).a2_no_partisans);

  try {
    ModelParams::from_thresholds(2, 0.5, 2.0 / 3.0, 1.0 / 3.0, 1.5, 1.0);
  } catch (const AssumptionError& e) {
    CHECK(std::string(e.what()).find("A3") != std::string::npos);
  }
}

TEST_CASE("conflict of interest") {
  CHECK(conflict_of_interest(fixtures::f9()));
  CHECK(conflict_of_interest(fixtures::f2()));
  CHECK_FALSE(conflict_of_interest(fixtures::f2(0.5, 0.5)));
}

TEST_CASE("rational round trip") {
  const auto exact = to_rational(fixtures::f2());
  CHECK(exact.p_alpha() == Rational(2, 3));
  CHECK(exact.t_P() == Rational(3, 2));
  CHECK(to_double_params(exact).p_beta() == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(rationalize(0.05) == Rational(1, 20));
}
