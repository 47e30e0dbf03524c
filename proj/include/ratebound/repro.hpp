#pragma once

#include <cstddef>
#include <vector>

#include "ratebound/calibration.hpp"
#include "ratebound/error_rate.hpp"
#include "ratebound/rating_core.hpp"

// Grids for the natural-error-rate tables and figure data of the reference
// discrete model: a 17-grade correlated-binomial profile (16 trials,
// lambda 0.55, rho 0.1) with logit PD curves fitted to (PD, AR) targets.

namespace ratebound::repro {

inline const CorrelatedBinomialParams &reference_params() {
  static const CorrelatedBinomialParams params(16, 0.55, 0.1);
  return params;
}

inline const RatingProfile &reference_profile() {
  static const RatingProfile profile = correlated_binomial_profile(reference_params());
  return profile;
}

/// At AR = 0 the fitted curve is flat, every grade ties, the risky set is
/// empty and the error rate collapses to p. The discrete curves are
/// reported as their limit from the right there, evaluated at this AR.
inline constexpr double kRightLimitAr = 1e-6;

inline double grid_ar(double ar) { return ar == 0.0 ? kRightLimitAr : ar; }

inline PdCurve fitted_curve(double pd, double ar) {
  return to_pd_curve(quasi_moment_match(reference_profile(), pd, ar));
}

inline std::vector<double> ar_grid(double step, double last) {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(last / step + 0.5);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) * step);
  return out;
}

struct Table2Row {
  double ar;
  double binormal;
  double discrete_pd1;
  double discrete_pd10;
};

/// Natural error rate against AR: binormal formula and the discrete model
/// at PD 1% and 10%.
inline std::vector<Table2Row> table2(const std::vector<double> &ars = ar_grid(0.1, 0.9)) {
  std::vector<Table2Row> rows;
  for (double ar : ars) {
    const double g = grid_ar(ar);
    rows.push_back({ar, natural_error_rate_from_ar(ar),
                    natural_error_rate(reference_profile(), fitted_curve(0.01, g)),
                    natural_error_rate(reference_profile(), fitted_curve(0.10, g))});
  }
  return rows;
}

struct Table3Row {
  double ar;
  SuperGradePds binormal;
  SuperGradePds discrete;
};

/// Average risky / safe PDs at p = 1%.
inline std::vector<Table3Row> table3(const std::vector<double> &ars = ar_grid(0.1, 0.9)) {
  constexpr double p = 0.01;
  std::vector<Table3Row> rows;
  for (double ar : ars) {
    rows.push_back({ar, super_grade_pds_binormal(p, ar),
                    super_grade_pds(reference_profile(), fitted_curve(p, grid_ar(ar)))});
  }
  return rows;
}

struct ConditionalRow {
  int grade;
  double unconditional;
  double default_low_ar;
  double survive_low_ar;
  double default_high_ar;
  double survive_high_ar;
};

inline constexpr double kFigurePd = 0.05;
inline constexpr double kFigureLowAr = 0.25;
inline constexpr double kFigureHighAr = 0.75;

/// Profile and default/survival-conditional grade distributions at PD 5%
/// and AR 25% / 75%.
inline std::vector<ConditionalRow> fig1() {
  const auto &profile = reference_profile();
  const auto low = bayes_invert(profile, fitted_curve(kFigurePd, kFigureLowAr));
  const auto high = bayes_invert(profile, fitted_curve(kFigurePd, kFigureHighAr));
  std::vector<ConditionalRow> rows;
  for (int s = 1; s <= profile.grades(); ++s) {
    rows.push_back({s, profile.mass(s), low.lik_default(s), low.lik_survive(s), high.lik_default(s),
                    high.lik_survive(s)});
  }
  return rows;
}

/// Same grid as table2 on a fine AR step.
inline std::vector<Table2Row> fig2() { return table2(ar_grid(0.01, 0.99)); }

struct PdCurveRow {
  int grade;
  double pd_low_ar;
  double pd_high_ar;
};

inline std::vector<PdCurveRow> fig3() {
  const auto low = fitted_curve(kFigurePd, kFigureLowAr);
  const auto high = fitted_curve(kFigurePd, kFigureHighAr);
  std::vector<PdCurveRow> rows;
  for (int s = 1; s <= low.grades(); ++s) rows.push_back({s, low.pd(s), high.pd(s)});
  return rows;
}

} // namespace ratebound::repro
