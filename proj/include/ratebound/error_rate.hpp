#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratebound/error.hpp"
#include "ratebound/numerics.hpp"
#include "ratebound/rating_core.hpp"

// Expected misclassification cost, the cost-optimal risky/safe split of a
// rating scale, and the natural error rate of that two-grade overlay.

namespace ratebound {

/// Misclassification costs: c_D for a missed defaulter, c_N for a flagged
/// survivor.
struct CostModel {
  double cost_default_missed;
  double cost_survivor_flagged;

  CostModel(double c_default, double c_survivor)
      : cost_default_missed(c_default), cost_survivor_flagged(c_survivor) {
    if (!(c_default > 0.0 && c_survivor > 0.0) || !std::isfinite(c_default) ||
        !std::isfinite(c_survivor)) {
      throw Error(ErrorKind::invalid_argument, "misclassification costs must be positive");
    }
  }
};

/// Costs inversely proportional to the class probabilities: (1/p, 1/(1-p)).
inline CostModel default_cost_model(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::domain, "default_cost_model requires 0 < p < 1");
  }
  return CostModel(1.0 / p, 1.0 / (1.0 - p));
}

/// The risky super-grade (grades flagged as "will default") with the
/// expected cost and misclassification rate of that split.
struct SuperGradeSplit {
  int grades = 0;
  std::vector<int> risky_grades; // ascending
  double expected_cost = 0.0;
  double error_rate = 0.0;

  bool is_risky(int grade) const {
    return std::binary_search(risky_grades.begin(), risky_grades.end(), grade);
  }
  std::vector<int> safe_grades() const {
    std::vector<int> out;
    for (int s = 1; s <= grades; ++s) {
      if (!is_risky(s)) out.push_back(s);
    }
    return out;
  }
  bool all_safe() const noexcept { return risky_grades.empty(); }
  bool all_risky() const noexcept {
    return static_cast<int>(risky_grades.size()) == grades;
  }
  bool is_degenerate() const noexcept { return all_safe() || all_risky(); }
};

/// C = c_D p P[S not in risky | D] + c_N (1-p) P[S in risky | N].
inline double expected_cost(const ConditionalDistributions &cond, std::span<const int> risky,
                            const CostModel &costs) {
  std::vector<char> flagged(static_cast<std::size_t>(cond.grades()), 0);
  for (int g : risky) {
    cond.scale().check(g);
    flagged[static_cast<std::size_t>(g - 1)] = 1;
  }
  double missed_defaults = 0.0;
  double flagged_survivors = 0.0;
  for (int s = 1; s <= cond.grades(); ++s) {
    if (flagged[static_cast<std::size_t>(s - 1)]) {
      flagged_survivors += cond.lik_survive(s);
    } else {
      missed_defaults += cond.lik_default(s);
    }
  }
  return costs.cost_default_missed * cond.p() * missed_defaults +
         costs.cost_survivor_flagged * (1.0 - cond.p()) * flagged_survivors;
}

/// Relative gap below which two likelihoods are treated as tied. Flat PD
/// curves otherwise split on rounding noise.
inline constexpr double kTieTolerance = 1e-12;

namespace detail {
inline bool strictly_greater(double a, double b) { return a - b > kTieTolerance * std::max(a, b); }
} // namespace detail

/// Risky set J = { s : lik_default(s) > lik_survive(s) }. Ties go to safe.
/// Cost is evaluated with the (1/p, 1/(1-p)) costs.
inline SuperGradeSplit optimal_split(const ConditionalDistributions &cond) {
  SuperGradeSplit split;
  split.grades = cond.grades();
  double missed_defaults = 0.0;
  double flagged_survivors = 0.0;
  for (int s = 1; s <= cond.grades(); ++s) {
    if (detail::strictly_greater(cond.lik_default(s), cond.lik_survive(s))) {
      split.risky_grades.push_back(s);
      flagged_survivors += cond.lik_survive(s);
    } else {
      missed_defaults += cond.lik_default(s);
    }
  }
  const double p = cond.p();
  split.error_rate = p * missed_defaults + (1.0 - p) * flagged_survivors;
  split.expected_cost = missed_defaults + flagged_survivors;
  return split;
}

/// Misclassification rate of the optimal risky/safe overlay, computed ex
/// ante from the profile and PD curve. A degenerate split (everything safe)
/// is legal and yields p.
inline Probability natural_error_rate(const RatingProfile &profile, const PdCurve &curve) {
  const auto split = optimal_split(bayes_invert(profile, curve));
  return Probability(std::clamp(split.error_rate, 0.0, 1.0));
}

struct SuperGradePds {
  double risky_pd;
  double safe_pd;
};

/// Average PD on the risky and on the safe super-grade.
inline SuperGradePds super_grade_pds(const RatingProfile &profile, const PdCurve &curve) {
  const auto cond = bayes_invert(profile, curve);
  const auto split = optimal_split(cond);
  double risky_mass = 0.0, risky_defaults = 0.0;
  double safe_mass = 0.0, safe_defaults = 0.0;
  for (int s = 1; s <= profile.grades(); ++s) {
    const double mass = profile.mass(s);
    const double defaults = curve.pd(s) * mass;
    if (split.is_risky(s)) {
      risky_mass += mass;
      risky_defaults += defaults;
    } else {
      safe_mass += mass;
      safe_defaults += defaults;
    }
  }
  if (!(risky_mass > 0.0)) throw SplitDegenerate(true, cond.p());
  if (!(safe_mass > 0.0)) throw SplitDegenerate(false, cond.p());
  return {risky_defaults / risky_mass, safe_defaults / safe_mass};
}

/// max_s |F_D(s) - F_N(s)|.
inline double ks_statistic(const ConditionalDistributions &cond) {
  double fd = 0.0, fn = 0.0, best = 0.0;
  for (int s = 1; s <= cond.grades(); ++s) {
    fd += cond.lik_default(s);
    fn += cond.lik_survive(s);
    best = std::max(best, std::abs(fd - fn));
  }
  return best;
}

/// True when lik_default / lik_survive is nonincreasing in the grade
/// (grades without mass skipped; a zero survivor likelihood counts as +inf).
inline bool likelihood_ratio_nonincreasing(const ConditionalDistributions &cond) {
  int prev = 0;
  for (int s = 1; s <= cond.grades(); ++s) {
    if (cond.lik_default(s) == 0.0 && cond.lik_survive(s) == 0.0) continue;
    if (prev != 0) {
      // ratio(prev) >= ratio(s)  <=>  lD(prev) lN(s) >= lD(s) lN(prev)
      if (detail::strictly_greater(cond.lik_default(s) * cond.lik_survive(prev),
                                   cond.lik_default(prev) * cond.lik_survive(s))) {
        return false;
      }
    }
    prev = s;
  }
  return true;
}

/// Threshold form of the optimal split: risky = {S <= s*}. Only defined when
/// the likelihood ratio is monotone; s* = 0 means nothing is risky.
inline std::optional<int> risky_threshold(const ConditionalDistributions &cond) {
  if (!likelihood_ratio_nonincreasing(cond)) return std::nullopt;
  int threshold = 0;
  for (int s = 1; s <= cond.grades(); ++s) {
    if (detail::strictly_greater(cond.lik_default(s), cond.lik_survive(s))) threshold = s;
  }
  return threshold;
}

// ---------------------------------------------------------------------------
// Binormal case: S_D ~ N(mu_D, sigma), S_N ~ N(mu_N, sigma)
// ---------------------------------------------------------------------------

struct BinormalModel {
  double mu_default;
  double mu_survive;
  double sigma;

  BinormalModel(double mu_d, double mu_n, double s) : mu_default(mu_d), mu_survive(mu_n), sigma(s) {
    if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(mu_d) || !std::isfinite(mu_n)) {
      throw Error(ErrorKind::invalid_argument, "binormal model needs finite means and sigma > 0");
    }
    if (mu_d > mu_n) {
      throw Error(ErrorKind::invalid_argument, "binormal model needs mu_default <= mu_survive");
    }
  }

  double separation() const noexcept { return (mu_survive - mu_default) / sigma; }
};

inline double accuracy_ratio_binormal(const BinormalModel &model) {
  return 2.0 * std_normal_cdf(model.separation() / std::numbers::sqrt2) - 1.0;
}

inline Probability natural_error_rate_binormal(const BinormalModel &model) {
  return std_normal_cdf(-0.5 * model.separation());
}

/// Natural error rate implied by an accuracy ratio under the binormal
/// model: Phi(-Phi^{-1}((AR+1)/2) / sqrt 2). Negative AR maps by the same
/// formula.
inline Probability natural_error_rate_from_ar(double ar) {
  if (!(ar > -1.0 && ar < 1.0)) {
    throw Error(ErrorKind::domain, "accuracy ratio must lie in (-1, 1), got " + std::to_string(ar));
  }
  // -Phi^{-1}((1+AR)/2) == Phi^{-1}((1-AR)/2); the latter keeps the tail exact.
  return std_normal_cdf(std_normal_quantile(0.5 * (1.0 - ar)) / std::numbers::sqrt2);
}

inline SuperGradePds super_grade_pds_binormal(double p, double ar) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::domain, "super_grade_pds_binormal requires 0 < p < 1");
  }
  const double eps = natural_error_rate_from_ar(ar);
  const double risky = p * (1.0 - eps) / (p * (1.0 - eps) + (1.0 - p) * eps);
  const double safe = p * eps / (p * eps + (1.0 - p) * (1.0 - eps));
  return {risky, safe};
}

} // namespace ratebound
