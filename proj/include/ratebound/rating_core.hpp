#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ratebound/error.hpp"
#include "ratebound/numerics.hpp"

// Rating scale data model and the Bayes relations between
// (rating profile, PD curve) and the grade distributions conditional on
// default / survival. Grades run 1..k; a higher grade means better credit
// quality, so defaulters concentrate in the low grades.

namespace ratebound {

/// Tolerance for probability vectors read from files before renormalisation.
inline constexpr double kInputSumTolerance = 1e-9;

class RatingScale {
public:
  explicit RatingScale(int grades) : grades_(grades) {
    if (grades < 2) {
      throw Error(ErrorKind::invalid_argument,
                  "rating scale needs at least 2 grades, got " + std::to_string(grades));
    }
  }

  int grades() const noexcept { return grades_; }
  bool contains(int grade) const noexcept { return grade >= 1 && grade <= grades_; }

  void check(int grade) const {
    if (!contains(grade)) {
      throw Error(ErrorKind::invalid_argument,
                  "grade " + std::to_string(grade) + " outside 1.." + std::to_string(grades_));
    }
  }

  friend bool operator==(const RatingScale &, const RatingScale &) = default;

private:
  int grades_;
};

namespace detail {

inline std::vector<double> checked_distribution(std::vector<double> v, double tolerance,
                                                const char *what) {
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::invalid_argument,
                  std::string(what) + ": entries must be finite and nonnegative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw Error(ErrorKind::invalid_argument,
                std::string(what) + ": masses sum to " + std::to_string(total) + ", not 1");
  }
  return v;
}

inline void check_same_scale(const RatingScale &a, const RatingScale &b) {
  if (!(a == b)) {
    throw Error(ErrorKind::invalid_argument,
                "scale mismatch: " + std::to_string(a.grades()) + " vs " +
                    std::to_string(b.grades()) + " grades");
  }
}

} // namespace detail

/// Unconditional grade distribution P[S = s].
class RatingProfile {
public:
  /// Accepts masses summing to 1 within `tolerance`, then renormalises.
  explicit RatingProfile(std::vector<double> mass, double tolerance = kInputSumTolerance)
      : scale_(static_cast<int>(mass.size())),
        mass_(detail::checked_distribution(std::move(mass), tolerance, "rating profile")) {
    double total = 0.0;
    for (double m : mass_) total += m;
    for (double &m : mass_) m /= total;
  }

  const RatingScale &scale() const noexcept { return scale_; }
  int grades() const noexcept { return scale_.grades(); }
  double mass(int grade) const { return mass_.at(static_cast<std::size_t>(grade - 1)); }
  std::span<const double> masses() const noexcept { return mass_; }

private:
  RatingScale scale_;
  std::vector<double> mass_;
};

/// Conditional PDs P[D | S = s]. Values 0 and 1 are legal per grade.
class PdCurve {
public:
  explicit PdCurve(std::vector<double> pd) : scale_(static_cast<int>(pd.size())), pd_(std::move(pd)) {
    for (double x : pd_) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorKind::invalid_argument,
                    "PD curve entries must lie in [0,1], got " + std::to_string(x));
      }
    }
  }

  const RatingScale &scale() const noexcept { return scale_; }
  int grades() const noexcept { return scale_.grades(); }
  double pd(int grade) const { return pd_.at(static_cast<std::size_t>(grade - 1)); }
  std::span<const double> pds() const noexcept { return pd_; }

private:
  RatingScale scale_;
  std::vector<double> pd_;
};

/// Grade distributions conditional on default (lik_default) and survival
/// (lik_survive), together with the unconditional PD p.
class ConditionalDistributions {
public:
  ConditionalDistributions(std::vector<double> lik_default, std::vector<double> lik_survive,
                           double p)
      : scale_(static_cast<int>(lik_default.size())),
        lik_default_(detail::checked_distribution(std::move(lik_default), kInputSumTolerance,
                                                  "default-conditional distribution")),
        lik_survive_(detail::checked_distribution(std::move(lik_survive), kInputSumTolerance,
                                                  "survival-conditional distribution")),
        p_(p) {
    detail::check_same_scale(scale_, RatingScale(static_cast<int>(lik_survive_.size())));
    if (!(p > 0.0 && p < 1.0)) {
      throw Error(ErrorKind::degenerate_portfolio,
                  "unconditional PD must lie strictly inside (0,1), got " + std::to_string(p));
    }
  }

  const RatingScale &scale() const noexcept { return scale_; }
  int grades() const noexcept { return scale_.grades(); }
  double p() const noexcept { return p_; }
  double lik_default(int grade) const { return lik_default_.at(static_cast<std::size_t>(grade - 1)); }
  double lik_survive(int grade) const { return lik_survive_.at(static_cast<std::size_t>(grade - 1)); }
  std::span<const double> lik_default() const noexcept { return lik_default_; }
  std::span<const double> lik_survive() const noexcept { return lik_survive_; }

  /// F_D(s) = P[S <= s | D]; grade 0 gives 0.
  double cdf_default(int grade) const {
    double acc = 0.0;
    for (int s = 1; s <= grade; ++s) acc += lik_default(s);
    return acc;
  }
  double cdf_survive(int grade) const {
    double acc = 0.0;
    for (int s = 1; s <= grade; ++s) acc += lik_survive(s);
    return acc;
  }

private:
  RatingScale scale_;
  std::vector<double> lik_default_;
  std::vector<double> lik_survive_;
  double p_;
};

/// p = sum_s P[D | S = s] P[S = s].
inline Probability unconditional_pd(const RatingProfile &profile, const PdCurve &curve) {
  detail::check_same_scale(profile.scale(), curve.scale());
  double p = 0.0;
  for (int s = 1; s <= profile.grades(); ++s) {
    p += curve.pd(s) * profile.mass(s);
  }
  return Probability(std::min(1.0, p));
}

/// Inverts the PD curve into the default- and survival-conditional grade
/// distributions. Normalisation is by the analytic p only.
inline ConditionalDistributions bayes_invert(const RatingProfile &profile, const PdCurve &curve) {
  const double p = unconditional_pd(profile, curve);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::degenerate_portfolio,
                "unconditional PD is " + std::to_string(p) + "; need 0 < p < 1");
  }
  const auto k = static_cast<std::size_t>(profile.grades());
  std::vector<double> lik_d(k), lik_n(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double mass = profile.masses()[i];
    const double pd = curve.pds()[i];
    lik_d[i] = pd * mass / p;
    lik_n[i] = (1.0 - pd) * mass / (1.0 - p);
  }
  return ConditionalDistributions(std::move(lik_d), std::move(lik_n), p);
}

/// Posterior P[D | S = grade] from the conditional distributions.
inline Probability conditional_pd(const ConditionalDistributions &cond, int grade) {
  cond.scale().check(grade);
  const double num = cond.p() * cond.lik_default(grade);
  const double den = num + (1.0 - cond.p()) * cond.lik_survive(grade);
  if (!(den > 0.0)) {
    throw Error(ErrorKind::undefined_grade,
                "grade " + std::to_string(grade) + " carries no probability mass");
  }
  return Probability(std::min(1.0, num / den));
}

/// PD curve implied by the conditional distributions at every grade with
/// positive mass; grades without mass get PD p.
inline PdCurve forward_pd_curve(const ConditionalDistributions &cond) {
  std::vector<double> pd(static_cast<std::size_t>(cond.grades()));
  for (int s = 1; s <= cond.grades(); ++s) {
    const double den = cond.p() * cond.lik_default(s) + (1.0 - cond.p()) * cond.lik_survive(s);
    pd[static_cast<std::size_t>(s - 1)] = den > 0.0 ? conditional_pd(cond, s).value() : cond.p();
  }
  return PdCurve(std::move(pd));
}

/// AR = 2 P[S_D < S_N] + P[S_D = S_N] - 1 for independent S_D, S_N.
inline double accuracy_ratio(const ConditionalDistributions &cond) {
  double below = 0.0; // F_D(s - 1)
  double acc = 0.0;
  for (int s = 1; s <= cond.grades(); ++s) {
    const double ld = cond.lik_default(s);
    acc += cond.lik_survive(s) * (2.0 * below + ld);
    below += ld;
  }
  return acc - 1.0;
}

/// Accuracy ratio predicted from profile and PD curve alone, evaluated
/// directly on the PD curve rather than via the inverted distributions.
inline double accuracy_ratio_ex_ante(const RatingProfile &profile, const PdCurve &curve) {
  const double p = unconditional_pd(profile, curve);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::degenerate_portfolio,
                "unconditional PD is " + std::to_string(p) + "; need 0 < p < 1");
  }
  double cross = 0.0;
  double ties = 0.0;
  double defaults_below = 0.0; // sum_{t<s} P[D|S=t] P[S=t]
  for (int s = 1; s <= profile.grades(); ++s) {
    const double mass = profile.mass(s);
    const double pd = curve.pd(s);
    cross += (1.0 - pd) * mass * defaults_below;
    ties += pd * (1.0 - pd) * mass * mass;
    defaults_below += pd * mass;
  }
  return (2.0 * cross + ties) / (p * (1.0 - p)) - 1.0;
}

} // namespace ratebound
