#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ratebound/error.hpp"
#include "ratebound/numerics.hpp"
#include "ratebound/rating_core.hpp"

// Synthetic rating models: a correlated-binomial rating profile and a
// logit PD curve fitted to a target (PD, AR) pair by quasi-moment matching.

namespace ratebound {

/// X ~ Binomial(k_trials, G(lambda, rho, Y)) mixed over a standard normal
/// factor Y; grades are S = X + 1.
struct CorrelatedBinomialParams {
  int k_trials;
  double lambda;
  double rho;

  CorrelatedBinomialParams(int trials, double lam, double r) : k_trials(trials), lambda(lam), rho(r) {
    if (trials < 1) {
      throw Error(ErrorKind::invalid_argument, "k_trials must be positive");
    }
    if (!(lam > 0.0 && lam < 1.0)) {
      throw Error(ErrorKind::domain, "lambda must lie in (0,1)");
    }
    if (!(r >= 0.0 && r < 1.0)) {
      throw Error(ErrorKind::domain, "rho must lie in [0,1)");
    }
  }

  int grades() const noexcept { return k_trials + 1; }
};

/// Rating profile on grades 1..k_trials+1.
inline RatingProfile correlated_binomial_profile(const CorrelatedBinomialParams &params,
                                                 const QuadratureRule &rule = default_gaussian_rule()) {
  const int k = params.k_trials;
  const double threshold = std_normal_quantile(params.lambda);
  const double load = std::sqrt(params.rho);
  const double scale = std::sqrt(1.0 - params.rho);

  std::vector<double> binom(static_cast<std::size_t>(k + 1));
  binom[0] = 1.0;
  for (int i = 1; i <= k; ++i) {
    binom[static_cast<std::size_t>(i)] =
        binom[static_cast<std::size_t>(i - 1)] * static_cast<double>(k - i + 1) / static_cast<double>(i);
  }

  std::vector<double> mass(static_cast<std::size_t>(k + 1));
  for (int x = 0; x <= k; ++x) {
    mass[static_cast<std::size_t>(x)] = integrate_gaussian(
        [&](double y) {
          const double z = (threshold - load * y) / scale;
          const double g = std_normal_cdf(z);
          const double one_minus_g = std_normal_cdf(-z);
          return binom[static_cast<std::size_t>(x)] * std::pow(g, x) * std::pow(one_minus_g, k - x);
        },
        rule);
  }
  double total = 0.0;
  for (double m : mass) {
    if (m < -1e-12) {
      throw Error(ErrorKind::numeric, "negative mass from quadrature");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorKind::numeric,
                "profile masses sum to " + std::to_string(total) + "; quadrature too coarse");
  }
  for (double &m : mass) m = std::max(m, 0.0);
  return RatingProfile(std::move(mass), 1e-10);
}

/// P[D | S = s] = 1 / (1 + exp(a + b s)); b >= 0 keeps the curve
/// nonincreasing in the grade.
struct LogitPdCurve {
  double intercept;
  double slope;
  RatingScale scale;

  LogitPdCurve(double a, double b, RatingScale s) : intercept(a), slope(b), scale(s) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw Error(ErrorKind::invalid_argument, "logit parameters must be finite");
    }
    if (b < 0.0) {
      throw Error(ErrorKind::invalid_argument, "logit slope must be nonnegative");
    }
  }
};

namespace detail {

/// 1 / (1 + e^t) without overflow.
inline double inverse_logit_complement(double t) noexcept {
  if (t > 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

} // namespace detail

inline Probability logit_pd(const LogitPdCurve &curve, int grade) {
  curve.scale.check(grade);
  return Probability(detail::inverse_logit_complement(curve.intercept + curve.slope * grade));
}

inline PdCurve to_pd_curve(const LogitPdCurve &curve) {
  std::vector<double> pd(static_cast<std::size_t>(curve.scale.grades()));
  for (int s = 1; s <= curve.scale.grades(); ++s) {
    pd[static_cast<std::size_t>(s - 1)] = logit_pd(curve, s);
  }
  return PdCurve(std::move(pd));
}

/// Largest AR any PD curve with portfolio PD `target_pd` can reach on the
/// profile: the step curve that loads all defaults onto the lowest grades.
/// Logit curves approach it as the slope grows but never attain it unless
/// the step falls exactly on a grade boundary.
inline double max_attainable_ar(const RatingProfile &profile, double target_pd) {
  if (!(target_pd > 0.0 && target_pd < 1.0)) {
    throw Error(ErrorKind::domain, "target PD must lie in (0,1)");
  }
  std::vector<double> pd(static_cast<std::size_t>(profile.grades()), 0.0);
  double remaining = target_pd;
  for (int s = 1; s <= profile.grades() && remaining > 0.0; ++s) {
    const double mass = profile.mass(s);
    if (mass <= 0.0) continue;
    const double take = std::min(mass, remaining);
    pd[static_cast<std::size_t>(s - 1)] = std::min(1.0, take / mass);
    remaining -= take;
  }
  return accuracy_ratio_ex_ante(profile, PdCurve(std::move(pd)));
}

struct CalibrationTolerances {
  double bracket_width = 1e-11;
  double target_check = 1e-9;
  double initial_slope_bracket = 50.0;
  double max_slope = 1e4;
};

namespace detail {

inline double implied_pd(const RatingProfile &profile, double a, double b) {
  double p = 0.0;
  for (int s = 1; s <= profile.grades(); ++s) {
    p += profile.mass(s) * inverse_logit_complement(a + b * s);
  }
  return p;
}

/// Intercept reproducing `target_pd` for a fixed slope. The implied PD is
/// strictly decreasing in the intercept.
inline double fit_intercept(const RatingProfile &profile, double target_pd, double b, double tol) {
  const double lo = -60.0 - b * profile.grades();
  const double hi = 60.0;
  return find_root([&](double a) { return implied_pd(profile, a, b) - target_pd; }, lo, hi, tol);
}

inline double implied_ar(const RatingProfile &profile, double target_pd, double b, double tol) {
  const double a = fit_intercept(profile, target_pd, b, tol);
  return accuracy_ratio_ex_ante(profile, to_pd_curve(LogitPdCurve(a, b, profile.scale())));
}

} // namespace detail

/// Fits (a, b) so that the profile's implied unconditional PD and ex-ante
/// AR equal the targets. Nested 1-D solves: intercept for the PD at fixed
/// slope (inner), slope for the AR (outer).
inline LogitPdCurve quasi_moment_match(const RatingProfile &profile, double target_pd, double target_ar,
                                       const CalibrationTolerances &tol = {}) {
  if (!(target_pd > 0.0 && target_pd < 1.0)) {
    throw Error(ErrorKind::domain, "target PD must lie in (0,1), got " + std::to_string(target_pd));
  }
  if (!(target_ar >= 0.0 && target_ar < 1.0)) {
    throw Error(ErrorKind::domain, "target AR must lie in [0,1), got " + std::to_string(target_ar));
  }
  if (target_ar == 0.0) {
    return LogitPdCurve(std::log((1.0 - target_pd) / target_pd), 0.0, profile.scale());
  }

  const double supremum = max_attainable_ar(profile, target_pd);
  if (target_ar >= supremum) {
    throw CalibrationInfeasible(target_ar, supremum);
  }

  auto ar_gap = [&](double b) {
    return detail::implied_ar(profile, target_pd, b, tol.bracket_width) - target_ar;
  };
  double b_hi = tol.initial_slope_bracket;
  while (ar_gap(b_hi) < 0.0) {
    if (b_hi >= tol.max_slope) {
      // Below the supremum but out of numerical reach of the logit family.
      throw CalibrationInfeasible(target_ar, supremum);
    }
    b_hi *= 2.0;
  }
  const double b = find_root(ar_gap, 0.0, b_hi, tol.bracket_width);
  const double a = detail::fit_intercept(profile, target_pd, b, tol.bracket_width);
  LogitPdCurve fitted(a, b, profile.scale());

  const auto curve = to_pd_curve(fitted);
  const double pd_err = std::abs(unconditional_pd(profile, curve) - target_pd);
  const double ar_err = std::abs(accuracy_ratio_ex_ante(profile, curve) - target_ar);
  if (pd_err > tol.target_check || ar_err > tol.target_check) {
    throw Error(ErrorKind::numeric, "quasi-moment matching missed targets (PD error " +
                                        std::to_string(pd_err) + ", AR error " + std::to_string(ar_err) +
                                        ")");
  }
  return fitted;
}

} // namespace ratebound
