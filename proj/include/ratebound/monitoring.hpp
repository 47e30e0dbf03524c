#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ratebound/error.hpp"
#include "ratebound/error_rate.hpp"
#include "ratebound/rating_core.hpp"

// Override monitoring: observed override rate, policy restrictions,
// direction balance, AR before and after overrides, and the end-of-period
// assessment against the natural error rate.
//
// Grades follow the convention "higher grade = better credit": a final
// grade above the proposed one is an upgrade.

namespace ratebound {

struct OverrideRecord {
  std::string borrower_id;
  std::chrono::year_month_day rating_date{};
  int proposed_grade = 0;
  int final_grade = 0;
  std::optional<std::string> reason_code;
  std::optional<bool> defaulted; // within one period of the rating date

  bool is_override() const noexcept { return proposed_grade != final_grade; }
  bool is_upgrade() const noexcept { return final_grade > proposed_grade; }
  bool is_downgrade() const noexcept { return final_grade < proposed_grade; }
};

struct OverridePolicy {
  std::optional<int> no_override_at_or_above; // k*
  std::optional<int> min_band;                // overrides need |g - g*| >= min_band
  bool downgrade_only = false;

  void validate(const RatingScale &scale) const {
    if (no_override_at_or_above && !(*no_override_at_or_above >= 1 && *no_override_at_or_above < scale.grades())) {
      throw Error(ErrorKind::invalid_argument, "no-override threshold must lie in 1..k-1");
    }
    if (min_band && *min_band < 1) {
      throw Error(ErrorKind::invalid_argument, "minimum override band must be >= 1");
    }
  }
};

enum class PolicyRule { override_at_or_above_threshold, band_too_narrow, upgrade_not_allowed };

inline const char *to_string(PolicyRule rule) {
  switch (rule) {
  case PolicyRule::override_at_or_above_threshold: return "override_at_or_above_threshold";
  case PolicyRule::band_too_narrow: return "band_too_narrow";
  case PolicyRule::upgrade_not_allowed: return "upgrade_not_allowed";
  }
  return "unknown";
}

struct PolicyViolation {
  std::size_t record_index; // 0-based position in the record list
  std::string borrower_id;
  std::vector<PolicyRule> rules;
};

/// Fraction of rating actions with final grade != proposed grade.
inline Probability override_rate(std::span<const OverrideRecord> records) {
  if (records.empty()) {
    throw Error(ErrorKind::empty_input, "override rate needs at least one rating action");
  }
  std::size_t overrides = 0;
  for (const auto &r : records) overrides += r.is_override() ? 1 : 0;
  return Probability(static_cast<double>(overrides) / static_cast<double>(records.size()));
}

/// One entry per record breaching at least one active restriction.
inline std::vector<PolicyViolation> check_policy(std::span<const OverrideRecord> records,
                                                 const OverridePolicy &policy) {
  std::vector<PolicyViolation> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &r = records[i];
    if (!r.is_override()) continue;
    std::vector<PolicyRule> rules;
    if (policy.no_override_at_or_above && r.proposed_grade >= *policy.no_override_at_or_above) {
      rules.push_back(PolicyRule::override_at_or_above_threshold);
    }
    if (policy.min_band && std::abs(r.final_grade - r.proposed_grade) < *policy.min_band) {
      rules.push_back(PolicyRule::band_too_narrow);
    }
    if (policy.downgrade_only && r.is_upgrade()) {
      rules.push_back(PolicyRule::upgrade_not_allowed);
    }
    if (!rules.empty()) out.push_back({i, r.borrower_id, std::move(rules)});
  }
  return out;
}

struct DirectionBalance {
  std::size_t n_upgrades = 0;
  std::size_t n_downgrades = 0;
};

inline DirectionBalance direction_balance(std::span<const OverrideRecord> records) {
  DirectionBalance b;
  for (const auto &r : records) {
    if (r.is_upgrade()) ++b.n_upgrades;
    if (r.is_downgrade()) ++b.n_downgrades;
  }
  return b;
}

struct GradeOutcome {
  int grade;
  bool defaulted;
};

/// Accuracy ratio of observed (grade, outcome) pairs, ties included.
inline double empirical_ar(std::span<const GradeOutcome> pairs) {
  int max_grade = 0;
  for (const auto &x : pairs) {
    if (x.grade < 1) throw Error(ErrorKind::invalid_argument, "grades must be >= 1");
    max_grade = std::max(max_grade, x.grade);
  }
  std::vector<double> defaults(static_cast<std::size_t>(max_grade) + 1, 0.0);
  std::vector<double> survivors(defaults.size(), 0.0);
  double n_d = 0.0, n_n = 0.0;
  for (const auto &x : pairs) {
    if (x.defaulted) {
      defaults[static_cast<std::size_t>(x.grade)] += 1.0;
      n_d += 1.0;
    } else {
      survivors[static_cast<std::size_t>(x.grade)] += 1.0;
      n_n += 1.0;
    }
  }
  if (n_d == 0.0 || n_n == 0.0) {
    throw Error(ErrorKind::insufficient_outcomes,
                "AR needs at least one default and one survivor; AR unavailable");
  }
  // sum over survivors of (2 * #defaults strictly below + #defaults tied)
  double below = 0.0, acc = 0.0;
  for (std::size_t g = 1; g < defaults.size(); ++g) {
    acc += survivors[g] * (2.0 * below + defaults[g]);
    below += defaults[g];
  }
  return acc / (n_d * n_n) - 1.0;
}

// ---------------------------------------------------------------------------
// Assessment
// ---------------------------------------------------------------------------

struct MonitoringConfig {
  double bound_slack = 0.0;              // breach when rate > bound + slack
  double ar_drop_tolerance = 0.0;        // flag when ar_pre - ar_post > tolerance
  double imbalance_minority_share = 0.25;
  std::size_t imbalance_min_overrides = 20;
  std::size_t min_defaults_for_ar = 1;
};

enum class VerdictCode {
  override_rate_above_bound,
  override_rate_below_bound_note,
  post_ar_below_pre_ar,
  post_ar_not_below_pre_ar,
  ar_unavailable,
  upward_imbalance,
  downward_imbalance,
  no_imbalance,
  policy_violations,
};

inline const char *to_string(VerdictCode code) {
  switch (code) {
  case VerdictCode::override_rate_above_bound: return "OVERRIDE_RATE_ABOVE_BOUND";
  case VerdictCode::override_rate_below_bound_note: return "OVERRIDE_RATE_BELOW_BOUND_NOTE";
  case VerdictCode::post_ar_below_pre_ar: return "POST_AR_BELOW_PRE_AR";
  case VerdictCode::post_ar_not_below_pre_ar: return "POST_AR_NOT_BELOW_PRE_AR";
  case VerdictCode::ar_unavailable: return "AR_UNAVAILABLE";
  case VerdictCode::upward_imbalance: return "UPWARD_IMBALANCE";
  case VerdictCode::downward_imbalance: return "DOWNWARD_IMBALANCE";
  case VerdictCode::no_imbalance: return "NO_IMBALANCE";
  case VerdictCode::policy_violations: return "POLICY_VIOLATIONS";
  }
  return "UNKNOWN";
}

struct Verdict {
  VerdictCode code;
  bool finding; // false: informational only
  std::string message;
};

struct MonitoringReport {
  std::size_t n_actions = 0;
  std::size_t n_overrides = 0;
  double override_rate = 0.0;
  double natural_error_rate = 0.0;
  bool bound_breached = false;
  std::size_t n_upgrades = 0;
  std::size_t n_downgrades = 0;
  std::size_t n_outcomes = 0; // records carrying a default flag
  std::size_t n_defaults = 0;
  std::optional<double> ar_pre;
  std::optional<double> ar_post;
  std::optional<double> ar_ex_ante;
  std::vector<PolicyViolation> policy_violations;
  std::vector<Verdict> verdicts;

  bool has_verdict(VerdictCode code) const {
    for (const auto &v : verdicts) {
      if (v.code == code) return true;
    }
    return false;
  }
};

namespace detail {

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

} // namespace detail

/// Assessment against an externally supplied natural error rate (for
/// instance from an accuracy ratio). Records must lie on `scale`.
inline MonitoringReport assess_with_bound(std::span<const OverrideRecord> records, double bound,
                                          const RatingScale &scale, const OverridePolicy &policy,
                                          const MonitoringConfig &config = {}) {
  if (records.empty()) {
    throw Error(ErrorKind::empty_input, "no rating actions to assess");
  }
  if (!(bound >= 0.0 && bound <= 1.0)) {
    throw Error(ErrorKind::domain, "natural error rate bound must lie in [0,1]");
  }
  policy.validate(scale);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!scale.contains(records[i].proposed_grade) || !scale.contains(records[i].final_grade)) {
      throw Error(ErrorKind::invalid_argument,
                  "record " + std::to_string(i) + " has a grade outside 1.." + std::to_string(scale.grades()));
    }
  }

  MonitoringReport rep;
  rep.n_actions = records.size();
  rep.override_rate = override_rate(records);
  for (const auto &r : records) rep.n_overrides += r.is_override() ? 1 : 0;
  rep.natural_error_rate = bound;
  rep.bound_breached = rep.override_rate > bound + config.bound_slack;
  const auto balance = direction_balance(records);
  rep.n_upgrades = balance.n_upgrades;
  rep.n_downgrades = balance.n_downgrades;
  rep.policy_violations = check_policy(records, policy);

  std::vector<GradeOutcome> pre, post;
  for (const auto &r : records) {
    if (!r.defaulted) continue;
    ++rep.n_outcomes;
    rep.n_defaults += *r.defaulted ? 1 : 0;
    pre.push_back({r.proposed_grade, *r.defaulted});
    post.push_back({r.final_grade, *r.defaulted});
  }
  const std::size_t n_survivors = rep.n_outcomes - rep.n_defaults;
  if (rep.n_defaults >= std::max<std::size_t>(1, config.min_defaults_for_ar) && n_survivors >= 1) {
    rep.ar_pre = empirical_ar(pre);
    rep.ar_post = empirical_ar(post);
  }

  // Bound comparison: exactly one of the two codes.
  if (rep.bound_breached) {
    rep.verdicts.push_back(
        {VerdictCode::override_rate_above_bound, true,
         "override rate " + detail::fixed6(rep.override_rate) + " exceeds natural error rate " +
             detail::fixed6(bound) +
             "; check the PD curve against observed discriminatory power and confirm overrides were justified"});
  } else {
    rep.verdicts.push_back(
        {VerdictCode::override_rate_below_bound_note, false,
         "override rate " + detail::fixed6(rep.override_rate) + " does not exceed natural error rate " +
             detail::fixed6(bound) + "; confirm the override procedure was followed"});
  }

  // Discriminatory power pre vs post overrides.
  if (rep.ar_pre && rep.ar_post) {
    if (*rep.ar_pre - *rep.ar_post > config.ar_drop_tolerance) {
      rep.verdicts.push_back({VerdictCode::post_ar_below_pre_ar, true,
                              "AR after overrides " + detail::fixed6(*rep.ar_post) + " below AR before " +
                                  detail::fixed6(*rep.ar_pre) + "; override governance may need an update"});
    } else {
      rep.verdicts.push_back({VerdictCode::post_ar_not_below_pre_ar, false,
                              "AR after overrides " + detail::fixed6(*rep.ar_post) + " vs before " +
                                  detail::fixed6(*rep.ar_pre)});
    }
  } else {
    rep.verdicts.push_back({VerdictCode::ar_unavailable, false,
                            "insufficient default observations for AR before/after overrides"});
  }

  // Direction imbalance.
  const double n_dir = static_cast<double>(rep.n_upgrades + rep.n_downgrades);
  const bool enough = rep.n_overrides >= config.imbalance_min_overrides && n_dir > 0.0;
  if (enough && static_cast<double>(rep.n_downgrades) < config.imbalance_minority_share * n_dir) {
    rep.verdicts.push_back({VerdictCode::upward_imbalance, true,
                            std::to_string(rep.n_upgrades) + " upgrades vs " + std::to_string(rep.n_downgrades) +
                                " downgrades; possible PD overestimation"});
  } else if (enough && static_cast<double>(rep.n_upgrades) < config.imbalance_minority_share * n_dir) {
    rep.verdicts.push_back({VerdictCode::downward_imbalance, true,
                            std::to_string(rep.n_downgrades) + " downgrades vs " + std::to_string(rep.n_upgrades) +
                                " upgrades; possible PD underestimation"});
  } else {
    rep.verdicts.push_back({VerdictCode::no_imbalance, false,
                            std::to_string(rep.n_upgrades) + " upgrades, " + std::to_string(rep.n_downgrades) +
                                " downgrades"});
  }

  if (!rep.policy_violations.empty()) {
    rep.verdicts.push_back({VerdictCode::policy_violations, true,
                            std::to_string(rep.policy_violations.size()) + " record(s) breach the override policy"});
  }
  return rep;
}

/// Assessment with the bound inferred ex ante from profile and PD curve.
inline MonitoringReport assess(std::span<const OverrideRecord> records, const RatingProfile &profile,
                               const PdCurve &curve, const OverridePolicy &policy,
                               const MonitoringConfig &config = {}) {
  const double bound = natural_error_rate(profile, curve);
  auto rep = assess_with_bound(records, bound, profile.scale(), policy, config);
  rep.ar_ex_ante = accuracy_ratio_ex_ante(profile, curve);
  return rep;
}

} // namespace ratebound
