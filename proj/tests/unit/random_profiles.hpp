#pragma once

#include "minheat/profiles.hpp"

#include <cmath>
#include <random>

namespace testutil {

// Sum of a few radial Gaussian shells, scaled onto the constraint set
// (unit norm, variance 3).
inline minheat::RadialProfile random_feasible_profile(std::mt19937& rng, double r_max = 14.0,
                                                      std::size_t panels = 70) {
  std::uniform_real_distribution<double> centre(0.0, 4.0), width(0.4, 1.5), amp(0.2, 1.0);
  std::uniform_int_distribution<int> count(1, 4);
  const int n = count(rng);
  double c[4], w[4], a[4];
  for (int i = 0; i < n; ++i) {
    c[i] = centre(rng);
    w[i] = width(rng);
    a[i] = amp(rng);
  }
  auto grid = minheat::RadialGrid::segmented(std::vector<double>{r_max}, panels, 8);
  auto raw = minheat::RadialProfile::sample(std::move(grid), [&](double r) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * std::exp(-0.5 * std::pow((r - c[i]) / w[i], 2));
    return s;
  });
  const auto m = minheat::check_constraints(raw);
  auto unit = raw.map([&](double v) { return v / m.norm; });
  return minheat::rescale(unit, std::sqrt(m.variance / 3.0));
}

} // namespace testutil
