#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <vector>

#include "ratebound/monitoring.hpp"
#include "ratebound/repro.hpp"

namespace fixtures {

struct OverrideFixtureParams {
  std::size_t n_records = 1000;
  std::size_t n_overrides = 350;
  std::size_t n_upgrades = 280;
  bool with_outcomes = true;
  std::uint64_t seed = 20240101;
};

// Proposed grades follow the reference profile, defaults follow the PD 5% /
// AR 75% fitted curve at the proposed grade, and overrides move the grade
// by 1..4 notches independently of the outcome.
inline std::vector<ratebound::OverrideRecord> override_fixture(const OverrideFixtureParams &params = {}) {
  using namespace std::chrono;
  const auto &profile = ratebound::repro::reference_profile();
  const auto curve = ratebound::repro::fitted_curve(0.05, 0.75);
  const int k = profile.grades();

  std::mt19937_64 rng(params.seed);
  std::discrete_distribution<int> grade_draw(profile.masses().begin(), profile.masses().end());
  std::uniform_int_distribution<int> notch(1, 4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<std::size_t> order(params.n_records);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> kind(params.n_records, 0); // 0 keep, +1 upgrade, -1 downgrade
  for (std::size_t i = 0; i < params.n_overrides; ++i) kind[order[i]] = i < params.n_upgrades ? 1 : -1;

  const sys_days start = 2024y / January / 1;
  std::vector<ratebound::OverrideRecord> out;
  out.reserve(params.n_records);
  for (std::size_t i = 0; i < params.n_records; ++i) {
    ratebound::OverrideRecord r;
    char id[32];
    std::snprintf(id, sizeof id, "B%05zu", i + 1);
    r.borrower_id = id;
    r.rating_date = year_month_day(start + days(static_cast<int>(i % 365)));
    int g = grade_draw(rng) + 1;
    if (kind[i] == 1) g = std::min(g, k - 1);
    if (kind[i] == -1) g = std::max(g, 2);
    r.proposed_grade = g;
    r.final_grade = std::clamp(g + kind[i] * notch(rng), 1, k);
    if (kind[i] != 0) r.reason_code = kind[i] > 0 ? "MGMT" : "SECTOR";
    if (params.with_outcomes) r.defaulted = unif(rng) < curve.pd(g);
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace fixtures
