#include "minheat/error.hpp"
#include "minheat/optimizer.hpp"
#include "random_profiles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

using namespace minheat;
using std::numbers::pi;

namespace {

double analytic_optimum(FunctionalKind kind) {
  switch (kind) {
  case FunctionalKind::GRW:
    return 0.375;
  case FunctionalKind::CSL:
    return 35.0 / (972.0 * pi);
  case FunctionalKind::DP:
    return 15.0 / (14.0 * std::pow(7.0, 1.5));
  }
  return 0.0;
}

const OptimizationResult& solved(FunctionalKind kind, std::size_t n) {
  static std::map<std::pair<FunctionalKind, std::size_t>, OptimizationResult> cache;
  auto it = cache.find({kind, n});
  if (it == cache.end()) {
    SolverOptions o;
    o.n_points = n;
    it = cache.emplace(std::make_pair(kind, n), minimize(kind, o)).first;
  }
  return it->second;
}

double l2_to_optimum(FunctionalKind kind, const RadialProfile& p) {
  const ClosedFormProfile cf{optimal_profile_kind(kind), 1.0};
  std::vector<double> breaks;
  if (cf.support_radius()) breaks.push_back(*cf.support_radius());
  return l2_distance(p, cf, breaks);
}

constexpr FunctionalKind kAll[] = {FunctionalKind::GRW, FunctionalKind::CSL, FunctionalKind::DP};

} // namespace

TEST_CASE("optimizer recovers the optimal values") {
  for (auto kind : kAll) {
    CAPTURE(to_string(kind));
    const auto& r = solved(kind, 400);
    CHECK(r.converged);
    CHECK(r.norm_err <= 1e-8);
    CHECK(r.var_err <= 1e-8);
    CHECK(r.min_value >= -1e-12);
    CHECK(std::abs(r.value / analytic_optimum(kind) - 1.0) <= 5e-3);
    // The discrete optimum lies above the continuum one.
    CHECK(r.value >= analytic_optimum(kind) * (1.0 - 1e-9));
    const auto m = check_constraints(r.profile);
    CHECK(m.norm == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(m.variance == doctest::Approx(3.0).epsilon(1e-8));
  }
}

TEST_CASE("optimizer profiles approach the closed forms under refinement") {
  for (auto kind : kAll) {
    CAPTURE(to_string(kind));
    const double d100 = l2_to_optimum(kind, solved(kind, 100).profile);
    const double d200 = l2_to_optimum(kind, solved(kind, 200).profile);
    const double d400 = l2_to_optimum(kind, solved(kind, 400).profile);
    CHECK(d200 < d100);
    CHECK(d400 < d200);
    CHECK(d400 < 1e-3);
  }
}

TEST_CASE("optimizer support radii and multipliers") {
  const auto& csl = solved(FunctionalKind::CSL, 400);
  CHECK(csl.support_estimate == doctest::Approx(3.0).epsilon(5e-3));
  const double R = csl.support_estimate;
  CHECK(csl.lambda == doctest::Approx(-0.6 * csl.mu * R * R).epsilon(1e-2));
  const auto& dp = solved(FunctionalKind::DP, 400);
  CHECK(dp.support_estimate == doctest::Approx(std::sqrt(7.0)).epsilon(5e-3));
  CHECK(dp.lambda == doctest::Approx(-dp.mu * 7.0).epsilon(1e-2));
  CHECK(dp.mu == doctest::Approx(15.0 / (4.0 * std::pow(7.0, 2.5))).epsilon(1e-2));
  // Gaussian: -1/2 f'' + mu r^2 f = -lambda f with f^2 of variance 3 gives mu = 1/8, lambda = -3/4.
  const auto& grw = solved(FunctionalKind::GRW, 400);
  CHECK(grw.mu == doctest::Approx(0.125).epsilon(1e-3));
  CHECK(grw.lambda == doctest::Approx(-0.75).epsilon(1e-3));
  CHECK(grw.support_estimate == 0.0);
}

TEST_CASE("perturbed starting points reach the same optimum") {
  for (auto kind : kAll) {
    CAPTURE(to_string(kind));
    SolverOptions o;
    o.n_points = 200;
    o.seed = 42;
    const auto r = minimize(kind, o);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(solved(kind, 200).value).epsilon(1e-7));
    o.seed = 42;
    CHECK(minimize(kind, o).value == r.value);
  }
}

TEST_CASE("iteration cap gives a non-converged result") {
  for (auto kind : kAll) {
    SolverOptions o;
    o.n_points = 50;
    o.max_iter = 1;
    const auto r = minimize(kind, o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations <= 1);
  }
  SolverOptions small;
  small.n_points = 20;
  CHECK_THROWS_AS(minimize(FunctionalKind::CSL, small), InvalidInput);
}

TEST_CASE("other length scales") {
  SolverOptions o;
  o.n_points = 200;
  o.r_c = 2.0;
  const auto r = minimize(FunctionalKind::DP, o);
  CHECK(r.converged);
  CHECK(check_constraints(r.profile).variance == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(r.support_estimate == doctest::Approx(2.0 * std::sqrt(7.0)).epsilon(5e-3));
  CHECK(r.value == doctest::Approx(solved(FunctionalKind::DP, 200).value / 8.0).epsilon(1e-6));
}

TEST_CASE("dense objective matches the tridiagonal one") {
  const LinearElements el(120, 10.0);
  const auto s = el.stiffness();
  const std::size_t n = s.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = s.diag()[i];
    if (i + 1 < n) a[i * n + i + 1] = a[(i + 1) * n + i] = s.off()[i];
  }
  SolverOptions o;
  o.n_points = n;
  const auto tri = minimize_quadratic(s, el, FunctionalKind::CSL, o);
  const auto dense = minimize_quadratic(DenseForm(n, std::move(a)), el, FunctionalKind::CSL, o);
  CHECK(dense.converged);
  CHECK(dense.value == doctest::Approx(tri.value).epsilon(1e-9));
  CHECK(dense.value == doctest::Approx(solved(FunctionalKind::CSL, 120).value).epsilon(1e-9));
}

TEST_CASE("global minimum certificate") {
  std::mt19937 rng(2024);
  std::vector<RadialProfile> samples;
  for (int i = 0; i < 100; ++i) samples.push_back(testutil::random_feasible_profile(rng));
  for (auto kind : kAll) {
    CAPTURE(to_string(kind));
    const double best = solved(kind, 400).value;
    int below = 0;
    for (const auto& g : samples) {
      const auto h = evaluate_heating(kind, g);
      if (!h.divergent && h.geometric_value < best * (1.0 - 1e-6)) ++below;
    }
    CHECK(below == 0);
  }
}

TEST_CASE("rearrangement does not increase the heating") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> centre(1.5, 3.5), width(0.3, 0.9);
  for (int trial = 0; trial < 20; ++trial) {
    const double c = centre(rng);
    const double w = width(rng);
    auto grid = RadialGrid::segmented(std::vector<double>{14.0}, 70, 8);
    auto raw = RadialProfile::sample(std::move(grid), [&](double r) {
      return std::exp(-0.5 * std::pow((r - c) / w, 2)) + 0.3 * std::exp(-r * r);
    });
    const auto m = check_constraints(raw);
    const auto g = rescale(raw.map([&](double v) { return v / m.norm; }), std::sqrt(m.variance / 3.0));
    const auto h = rearrange_and_rescale(g);
    for (auto kind : {FunctionalKind::CSL, FunctionalKind::DP}) {
      CAPTURE(to_string(kind));
      CHECK(evaluate_heating(kind, h).geometric_value <=
            evaluate_heating(kind, g).geometric_value * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("Euler-Lagrange closed forms") {
  const auto csl = solve_euler_lagrange(FunctionalKind::CSL);
  CHECK(std::abs(csl.R - 3.0) <= 1e-9);
  CHECK(csl.c == doctest::Approx(105.0 / (32.0 * pi * 27.0)).epsilon(1e-12));
  CHECK(csl.lambda == doctest::Approx(-0.6 * csl.mu * csl.R * csl.R).epsilon(1e-12));
  const ClosedFormProfile cf{ProfileKind::CslOptimal, 1.0};
  for (double r = 0.0; r <= 4.0; r += 0.05) CHECK(std::abs(csl.profile(r) - cf(r)) <= 1e-10);

  const auto dp = solve_euler_lagrange(FunctionalKind::DP);
  CHECK(std::abs(dp.R - std::sqrt(7.0)) <= 1e-9);
  // Normalizing (mu / 2 pi)(R^2 - r^2) gives mu = 15 / (4 R^5).
  CHECK(dp.mu == doctest::Approx(15.0 / (4.0 * std::pow(7.0, 2.5))).epsilon(1e-12));
  CHECK(dp.lambda == doctest::Approx(-dp.mu * 7.0).epsilon(1e-12));
  const ClosedFormProfile df{ProfileKind::DpOptimal, 1.0};
  for (double r = 0.0; r <= 4.0; r += 0.05) CHECK(std::abs(dp.profile(r) - df(r)) <= 1e-10);
  const auto m = check_constraints(dp.profile);
  CHECK(m.norm == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(solve_euler_lagrange(FunctionalKind::GRW), UnsupportedKind);
}

TEST_CASE("Gaussian penalties") {
  CHECK(std::abs(gaussian_penalty(FunctionalKind::CSL) - 47.0) <= 1.0);
  CHECK(std::abs(gaussian_penalty(FunctionalKind::DP) - 22.0) <= 1.0);
  CHECK(std::abs(gaussian_penalty(FunctionalKind::GRW)) <= 1e-4);
}
