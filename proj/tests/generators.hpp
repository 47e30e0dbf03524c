#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "ratebound/rating_core.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::vector<double> simplex(int k, Rng &rng, double floor = 1e-3) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> v(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double &x : v) total += (x = u(rng));
  for (double &x : v) x /= total;
  return v;
}

inline std::vector<double> pds(int k, Rng &rng, double lo = 1e-4, double hi = 0.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(k));
  for (double &x : v) x = u(rng);
  return v;
}

// Strictly decreasing in grade.
inline std::vector<double> decreasing_pds(int k, Rng &rng, double lo = 1e-4, double hi = 0.5) {
  auto v = pds(k, rng, lo, hi);
  std::sort(v.begin(), v.end(), std::greater<>());
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) v[i] = v[i - 1] * (1.0 - 1e-6);
  }
  return v;
}

inline int grades(Rng &rng, int lo = 2, int hi = 12) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline ratebound::RatingProfile profile(int k, Rng &rng) { return ratebound::RatingProfile(simplex(k, rng)); }

} // namespace gen
