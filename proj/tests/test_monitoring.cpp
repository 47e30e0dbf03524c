#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "ratebound/error_rate.hpp"
#include "ratebound/monitoring.hpp"
#include "ratebound/repro.hpp"
#include "test_util.hpp"

using namespace ratebound;
using Catch::Matchers::WithinAbs;

namespace {

OverrideRecord rec(int proposed, int final_grade, std::optional<bool> defaulted = std::nullopt) {
  OverrideRecord r;
  r.borrower_id = "B" + std::to_string(proposed) + "-" + std::to_string(final_grade);
  r.rating_date = std::chrono::year_month_day(std::chrono::year(2024), std::chrono::month(3), std::chrono::day(1));
  r.proposed_grade = proposed;
  r.final_grade = final_grade;
  r.defaulted = defaulted;
  return r;
}

// n records of which the first n_up are upgrades and the next n_down downgrades.
std::vector<OverrideRecord> batch(std::size_t n, std::size_t n_up, std::size_t n_down) {
  std::vector<OverrideRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_up) out.push_back(rec(8, 10));
    else if (i < n_up + n_down) out.push_back(rec(8, 6));
    else out.push_back(rec(8, 8));
  }
  return out;
}

const RatingScale scale17(17);
const double bound_ar50 = natural_error_rate_from_ar(0.5);

} // namespace

TEST_CASE("override rate") {
  CHECK_THAT(override_rate(batch(10, 2, 1)).value(), WithinAbs(0.3, 1e-15));
  CHECK(override_rate(batch(10, 0, 0)) == 0.0);
  CHECK(override_rate(batch(4, 2, 2)) == 1.0);
  CHECK(error_kind([] { (void)override_rate(std::vector<OverrideRecord>{}); }) == ErrorKind::empty_input);
}

TEST_CASE("override direction") {
  CHECK(rec(5, 6).is_upgrade());
  CHECK(rec(5, 4).is_downgrade());
  CHECK_FALSE(rec(5, 5).is_override());
  const auto b = direction_balance(batch(20, 7, 3));
  CHECK(b.n_upgrades == 7);
  CHECK(b.n_downgrades == 3);
}

TEST_CASE("policy checks") {
  std::vector<OverrideRecord> records = {rec(15, 13), rec(10, 11), rec(5, 5), rec(16, 16), rec(3, 8)};
  OverridePolicy policy;
  policy.no_override_at_or_above = 15;
  policy.min_band = 2;
  policy.downgrade_only = true;
  const auto v = check_policy(records, policy);
  REQUIRE(v.size() == 3);
  CHECK(v[0].record_index == 0);
  CHECK(v[0].rules == std::vector<PolicyRule>{PolicyRule::override_at_or_above_threshold});
  CHECK(v[1].record_index == 1);
  CHECK(v[1].rules == std::vector<PolicyRule>{PolicyRule::band_too_narrow, PolicyRule::upgrade_not_allowed});
  CHECK(v[2].record_index == 4);
  CHECK(v[2].rules == std::vector<PolicyRule>{PolicyRule::upgrade_not_allowed});
  CHECK(check_policy(records, OverridePolicy{}).empty());

  OverridePolicy bad;
  bad.no_override_at_or_above = 17;
  CHECK(error_kind([&] { bad.validate(scale17); }) == ErrorKind::invalid_argument);
  OverridePolicy bad_band;
  bad_band.min_band = 0;
  CHECK(error_kind([&] { bad_band.validate(scale17); }) == ErrorKind::invalid_argument);
}

TEST_CASE("empirical AR") {
  const std::vector<GradeOutcome> perfect = {{1, true}, {2, true}, {3, false}, {4, false}};
  CHECK_THAT(empirical_ar(perfect), WithinAbs(1.0, 1e-15));
  const std::vector<GradeOutcome> tied = {{2, true}, {2, false}, {2, false}};
  CHECK_THAT(empirical_ar(tied), WithinAbs(0.0, 1e-15));
  const std::vector<GradeOutcome> mixed = {{1, true}, {3, true}, {2, false}, {4, false}, {5, false}};
  CHECK_THAT(empirical_ar(mixed), WithinAbs(4.0 / 6.0, 1e-15));
  const std::vector<GradeOutcome> no_defaults = {{1, false}, {2, false}};
  CHECK(error_kind([&] { (void)empirical_ar(no_defaults); }) == ErrorKind::insufficient_outcomes);
  const std::vector<GradeOutcome> no_survivors = {{1, true}};
  CHECK(error_kind([&] { (void)empirical_ar(no_survivors); }) == ErrorKind::insufficient_outcomes);
}

TEST_CASE("empirical AR converges to the model AR") {
  const auto &profile = repro::reference_profile();
  const auto curve = repro::fitted_curve(0.10, 0.6);
  const double model_ar = accuracy_ratio_ex_ante(profile, curve);
  std::mt19937_64 rng(909);
  std::discrete_distribution<int> grade(profile.masses().begin(), profile.masses().end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<GradeOutcome> sample;
  std::size_t n_d = 0;
  for (int i = 0; i < 100000; ++i) {
    const int g = grade(rng) + 1;
    const bool d = u(rng) < curve.pd(g);
    n_d += d ? 1 : 0;
    sample.push_back({g, d});
  }
  const std::size_t n_min = std::min(n_d, sample.size() - n_d);
  const double sd_bound = 2.0 * std::sqrt(0.25 / static_cast<double>(n_min));
  CHECK_THAT(empirical_ar(sample), WithinAbs(model_ar, 3.0 * sd_bound));
}

TEST_CASE("bound breach verdicts") {
  const auto above = assess_with_bound(batch(10, 3, 1), bound_ar50, scale17, {});
  CHECK(above.bound_breached);
  CHECK(above.has_verdict(VerdictCode::override_rate_above_bound));
  CHECK_FALSE(above.has_verdict(VerdictCode::override_rate_below_bound_note));

  const auto below = assess_with_bound(batch(10, 1, 0), bound_ar50, scale17, {});
  CHECK_FALSE(below.bound_breached);
  CHECK(below.has_verdict(VerdictCode::override_rate_below_bound_note));

  MonitoringConfig slack;
  slack.bound_slack = 0.1;
  CHECK_FALSE(assess_with_bound(batch(10, 3, 1), bound_ar50, scale17, {}, slack).bound_breached);
}

TEST_CASE("AR verdicts") {
  std::vector<OverrideRecord> improved = {rec(3, 1, true), rec(2, 2, true), rec(4, 6, false), rec(3, 3, false),
                                          rec(5, 5, false)};
  const auto good = assess_with_bound(improved, 0.5, scale17, {});
  REQUIRE(good.ar_pre);
  REQUIRE(good.ar_post);
  CHECK(*good.ar_post >= *good.ar_pre);
  CHECK(good.has_verdict(VerdictCode::post_ar_not_below_pre_ar));

  std::vector<OverrideRecord> harmful = {rec(1, 6, true), rec(2, 2, true), rec(6, 1, false), rec(4, 4, false)};
  const auto bad = assess_with_bound(harmful, 0.5, scale17, {});
  CHECK(*bad.ar_post < *bad.ar_pre);
  CHECK(bad.has_verdict(VerdictCode::post_ar_below_pre_ar));

  const auto none = assess_with_bound(batch(10, 1, 0), 0.5, scale17, {});
  CHECK_FALSE(none.ar_pre);
  CHECK(none.has_verdict(VerdictCode::ar_unavailable));
}

TEST_CASE("imbalance verdicts") {
  CHECK(assess_with_bound(batch(100, 20, 2), 0.5, scale17, {}).has_verdict(VerdictCode::upward_imbalance));
  CHECK(assess_with_bound(batch(100, 2, 20), 0.5, scale17, {}).has_verdict(VerdictCode::downward_imbalance));
  CHECK(assess_with_bound(batch(100, 12, 10), 0.5, scale17, {}).has_verdict(VerdictCode::no_imbalance));
  // Too few overrides to judge.
  CHECK(assess_with_bound(batch(100, 5, 0), 0.5, scale17, {}).has_verdict(VerdictCode::no_imbalance));
}

TEST_CASE("assessment input checks") {
  CHECK(error_kind([] { (void)assess_with_bound(std::vector<OverrideRecord>{}, 0.3, scale17, {}); }) ==
        ErrorKind::empty_input);
  CHECK(error_kind([] { (void)assess_with_bound(batch(3, 0, 0), 1.5, scale17, {}); }) == ErrorKind::domain);
  const std::vector<OverrideRecord> outside = {rec(18, 17)};
  CHECK(error_kind([&] { (void)assess_with_bound(outside, 0.3, scale17, {}); }) == ErrorKind::invalid_argument);
}

TEST_CASE("every assessment carries exactly one verdict per dimension") {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> g(1, 17), n(1, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<OverrideRecord> records;
    const int size = n(rng);
    const double p_outcome = u(rng);
    for (int i = 0; i < size; ++i) {
      std::optional<bool> d;
      if (u(rng) < p_outcome) d = u(rng) < 0.3;
      records.push_back(rec(g(rng), u(rng) < 0.6 ? -1 : g(rng), d));
      if (records.back().final_grade == -1) records.back().final_grade = records.back().proposed_grade;
    }
    OverridePolicy policy;
    if (u(rng) < 0.5) policy.downgrade_only = true;
    const auto rep = assess_with_bound(records, u(rng), scale17, policy);
    auto count = [&](std::initializer_list<VerdictCode> codes) {
      return std::count_if(rep.verdicts.begin(), rep.verdicts.end(), [&](const Verdict &v) {
        return std::find(codes.begin(), codes.end(), v.code) != codes.end();
      });
    };
    CHECK(count({VerdictCode::override_rate_above_bound, VerdictCode::override_rate_below_bound_note}) == 1);
    CHECK(count({VerdictCode::post_ar_below_pre_ar, VerdictCode::post_ar_not_below_pre_ar,
                 VerdictCode::ar_unavailable}) == 1);
    CHECK(count({VerdictCode::upward_imbalance, VerdictCode::downward_imbalance, VerdictCode::no_imbalance}) == 1);
    CHECK(count({VerdictCode::policy_violations}) == (rep.policy_violations.empty() ? 0 : 1));
    CHECK(rep.n_upgrades + rep.n_downgrades == rep.n_overrides);
    CHECK(rep.n_overrides <= rep.n_actions);
    CHECK_THAT(rep.override_rate,
               WithinAbs(static_cast<double>(rep.n_overrides) / static_cast<double>(rep.n_actions), 1e-15));
  }
}

TEST_CASE("assessment from a profile and curve") {
  const auto &profile = repro::reference_profile();
  const auto curve = repro::fitted_curve(0.05, 0.75);
  const auto records = fixtures::override_fixture();
  const auto rep = assess(records, profile, curve, {});
  CHECK_THAT(rep.natural_error_rate, WithinAbs(natural_error_rate(profile, curve), 1e-15));
  REQUIRE(rep.ar_ex_ante);
  CHECK_THAT(*rep.ar_ex_ante, WithinAbs(0.75, 1e-9));
}

TEST_CASE("synthetic fixture") {
  const auto records = fixtures::override_fixture();
  const auto rep = assess_with_bound(records, bound_ar50, scale17, {});
  CHECK(rep.n_actions == 1000);
  CHECK(rep.n_overrides == 350);
  CHECK(rep.n_upgrades == 280);
  CHECK(rep.n_downgrades == 70);
  CHECK(rep.bound_breached);
  CHECK(rep.has_verdict(VerdictCode::upward_imbalance));
  REQUIRE(rep.ar_pre);
  CHECK(*rep.ar_post < *rep.ar_pre);
  CHECK(rep.has_verdict(VerdictCode::post_ar_below_pre_ar));

  const auto again = assess_with_bound(fixtures::override_fixture(), bound_ar50, scale17, {});
  CHECK(again.override_rate == rep.override_rate);
  CHECK(*again.ar_post == *rep.ar_post);
  REQUIRE(again.verdicts.size() == rep.verdicts.size());
  for (std::size_t i = 0; i < rep.verdicts.size(); ++i) {
    CHECK(again.verdicts[i].code == rep.verdicts[i].code);
    CHECK(again.verdicts[i].message == rep.verdicts[i].message);
  }
}
