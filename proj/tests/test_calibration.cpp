#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "ratebound/calibration.hpp"
#include "ratebound/error_rate.hpp"
#include "ratebound/repro.hpp"
#include "test_util.hpp"

using namespace ratebound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("correlated binomial parameters") {
  CHECK(error_kind([] { CorrelatedBinomialParams p(0, 0.5, 0.1); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([] { CorrelatedBinomialParams p(4, 1.0, 0.1); }) == ErrorKind::domain);
  CHECK(error_kind([] { CorrelatedBinomialParams p(4, 0.5, 1.0); }) == ErrorKind::domain);
  CHECK(CorrelatedBinomialParams(16, 0.55, 0.1).grades() == 17);
}

TEST_CASE("zero correlation gives the binomial distribution") {
  const auto profile = correlated_binomial_profile({10, 0.3, 0.0});
  for (int x = 0; x <= 10; ++x) {
    const double pmf = std::exp(std::lgamma(11.0) - std::lgamma(x + 1.0) - std::lgamma(11.0 - x) +
                                x * std::log(0.3) + (10 - x) * std::log(0.7));
    CHECK_THAT(profile.mass(x + 1), WithinAbs(pmf, 1e-12));
  }
}

TEST_CASE("reference profile against Simpson quadrature and Monte Carlo") {
  const auto &profile = repro::reference_profile();
  REQUIRE(profile.grades() == 17);
  const auto simpson = oracle::correlated_binomial(16, 0.55, 0.1);
  double mean = 0.0, total = 0.0;
  for (int s = 1; s <= 17; ++s) {
    CHECK_THAT(profile.mass(s), WithinAbs(simpson[static_cast<std::size_t>(s - 1)], 1e-12));
    CHECK(profile.mass(s) >= 0.0);
    mean += s * profile.mass(s);
    total += profile.mass(s);
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-14));
  // E[X] = k lambda, so the mean grade is 16 * 0.55 + 1.
  CHECK_THAT(mean, WithinAbs(9.8, 1e-12));
  CHECK_THAT(oracle::monte_carlo_mean_grade(16, 0.55, 0.1, 200000, 99), WithinAbs(mean, 0.03));
}

TEST_CASE("profiles across correlations stay normalised") {
  for (double rho : {0.0, 0.05, 0.2, 0.35, 0.5}) {
    for (double lambda : {0.05, 0.5, 0.95}) {
      const auto profile = correlated_binomial_profile({12, lambda, rho});
      double mean = 0.0;
      for (int s = 1; s <= 13; ++s) mean += (s - 1) * profile.mass(s);
      CHECK_THAT(mean, WithinRel(12.0 * lambda, 1e-8));
    }
  }
}

TEST_CASE("logit PD curve") {
  const RatingScale scale(5);
  CHECK(logit_pd({0.0, 0.0, scale}, 3) == 0.5);
  CHECK_THAT(logit_pd({std::log(99.0), 0.0, scale}, 1).value(), WithinAbs(0.01, 1e-15));
  const LogitPdCurve steep(1e4, 0.0, scale);
  CHECK(logit_pd(steep, 1) >= 0.0);
  CHECK(logit_pd(steep, 1) < 1e-300);
  CHECK(logit_pd({-1e4, 0.0, scale}, 1) == 1.0);
  CHECK(error_kind([&] { LogitPdCurve c(0.0, -1.0, scale); }) == ErrorKind::invalid_argument);
  const auto curve = to_pd_curve({-2.0, 0.7, scale});
  for (int s = 2; s <= 5; ++s) CHECK(curve.pd(s) < curve.pd(s - 1));
}

TEST_CASE("quasi-moment matching hits its targets") {
  const auto &profile = repro::reference_profile();
  const auto fit = quasi_moment_match(profile, 0.05, 0.75);
  CHECK_THAT(fit.intercept, WithinAbs(-2.13522380727, 1e-9));
  CHECK_THAT(fit.slope, WithinAbs(0.647568359299, 1e-9));
  const auto curve = to_pd_curve(fit);
  CHECK_THAT(unconditional_pd(profile, curve).value(), WithinAbs(0.05, 1e-9));
  CHECK_THAT(accuracy_ratio_ex_ante(profile, curve), WithinAbs(0.75, 1e-9));
}

TEST_CASE("zero AR gives a flat curve") {
  const auto fit = quasi_moment_match(repro::reference_profile(), 0.05, 0.0);
  CHECK(fit.slope == 0.0);
  CHECK_THAT(fit.intercept, WithinAbs(std::log(19.0), 1e-14));
  const auto curve = to_pd_curve(fit);
  for (int s = 1; s <= 17; ++s) CHECK_THAT(curve.pd(s), WithinAbs(0.05, 1e-15));
}

TEST_CASE("calibration input checks") {
  const auto &profile = repro::reference_profile();
  CHECK(error_kind([&] { (void)quasi_moment_match(profile, 0.0, 0.5); }) == ErrorKind::domain);
  CHECK(error_kind([&] { (void)quasi_moment_match(profile, 1.0, 0.5); }) == ErrorKind::domain);
  CHECK(error_kind([&] { (void)quasi_moment_match(profile, 0.05, -0.1); }) == ErrorKind::domain);
  CHECK(error_kind([&] { (void)quasi_moment_match(profile, 0.05, 1.0); }) == ErrorKind::domain);
}

TEST_CASE("unattainable AR is reported with the supremum") {
  const RatingProfile three({0.2, 0.5, 0.3});
  const double sup = max_attainable_ar(three, 0.05);
  CHECK(sup < 0.999);
  CHECK(sup > 0.8);
  try {
    (void)quasi_moment_match(three, 0.05, 0.999);
    FAIL("expected infeasible calibration");
  } catch (const CalibrationInfeasible &e) {
    CHECK(e.target_ar() == 0.999);
    CHECK_THAT(e.supremum(), WithinAbs(sup, 1e-15));
  }
  const auto fit = quasi_moment_match(three, 0.05, sup - 0.01);
  CHECK_THAT(accuracy_ratio_ex_ante(three, to_pd_curve(fit)), WithinAbs(sup - 0.01, 1e-9));
}

TEST_CASE("step curve supremum bounds every logit fit") {
  const auto &profile = repro::reference_profile();
  const double sup = max_attainable_ar(profile, 0.05);
  for (double b : {1.0, 5.0, 20.0, 100.0}) {
    const double a = detail::fit_intercept(profile, 0.05, b, 1e-12);
    CHECK(accuracy_ratio_ex_ante(profile, to_pd_curve({a, b, profile.scale()})) <= sup + 1e-12);
  }
}

TEST_CASE("slope grows with AR and fitted curves decrease") {
  const auto &profile = repro::reference_profile();
  for (double pd : {0.01, 0.05, 0.10, 0.3}) {
    double prev_slope = 0.0;
    for (double ar = 0.05; ar < 0.95; ar += 0.05) {
      const auto fit = quasi_moment_match(profile, pd, ar);
      CHECK(fit.slope >= prev_slope);
      prev_slope = fit.slope;
      const auto curve = to_pd_curve(fit);
      for (int s = 2; s <= 17; ++s) CHECK(curve.pd(s) <= curve.pd(s - 1));
    }
  }
}

TEST_CASE("random feasible calibrations round trip") {
  gen::Rng rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = gen::grades(rng, 3, 20);
    const auto profile = gen::profile(k, rng);
    const double pd = 0.005 + 0.3 * u(rng);
    const double ar = 0.95 * u(rng) * max_attainable_ar(profile, pd);
    const auto curve = to_pd_curve(quasi_moment_match(profile, pd, ar));
    CHECK_THAT(unconditional_pd(profile, curve).value(), WithinAbs(pd, 1e-9));
    CHECK_THAT(accuracy_ratio_ex_ante(profile, curve), WithinAbs(ar, 1e-9));
  }
}
