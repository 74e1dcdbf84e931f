#include "minheat/error.hpp"
#include "minheat/functionals.hpp"
#include "minheat/hybrid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace minheat;
using std::numbers::pi;

namespace {

RadialProfile closed(ProfileKind kind, double r_c = 1.0) { return make_closed_form({kind, r_c}); }

ModelParams params(double G, double hbar) {
  ModelParams p;
  p.G = G;
  p.hbar = hbar;
  return p;
}

double coulomb(const ModelParams& p, double k) { return 2.0 * pi * p.G / (p.hbar * k * k); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Transform of the CSL bump up to a positive factor, by Simpson's rule.
double bump_transform(double k) {
  const double R = 3.0;
  const int m = 4000;
  auto f = [&](double r) { return r * std::pow(R * R - r * r, 2) * std::sin(k * r); };
  double s = f(0.0) + f(R);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * R / m);
  return s;
}

} // namespace

TEST_CASE("correlator values") {
  const auto csl = Correlator::csl_delta(3.0, 0.5);
  CHECK(csl.value(0.1) == doctest::Approx(12.0));
  CHECK(csl.value(40.0) == doctest::Approx(12.0));
  const auto dp = Correlator::dp_coulomb(2.0, 0.5);
  CHECK(dp.value(2.0) == doctest::Approx(2.0 * pi * 2.0 / (0.5 * 4.0)));
  const auto fb = Correlator::feedback(csl, 2.0, 0.5);
  CHECK(fb.value(2.0) == doctest::Approx(4.0 * pi * pi * 4.0 / (0.25 * 16.0 * 12.0)));
  CHECK(fb.log_value(2.0) == doctest::Approx(std::log(fb.value(2.0))));
  const auto s = Correlator::sampled({1.0, 2.0, 4.0}, {1.0, 4.0, 16.0});
  CHECK(s.value(3.0) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(s.value(8.0) == doctest::Approx(64.0).epsilon(1e-12));
  CHECK(s.value(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(Correlator::csl_delta(-1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(Correlator::sampled({1.0, 1.0}, {1.0, 2.0}), InvalidInput);
  CHECK_THROWS_AS(Correlator::sampled({1.0, 2.0}, {1.0, -2.0}), InversionError);
}

TEST_CASE("feedback map is an involution with the Coulomb product") {
  const auto p = params(2.0, 0.7);
  const auto k = default_k_grid();
  std::vector<Correlator> inputs;
  {
    std::vector<double> v;
    for (double kk : k) v.push_back(1.0 + 0.5 * std::sin(kk) + 0.1 * kk * kk);
    inputs.push_back(Correlator::sampled(k, v));
  }
  const auto g1 = fourier_radial(closed(ProfileKind::Gaussian, 1.0), k);
  const auto g2 = fourier_radial(closed(ProfileKind::Gaussian, 1.3), k);
  const auto [pc, pg] = pld_correlators(g1, g2, p);
  inputs.push_back(pc);
  inputs.push_back(pg);
  for (const auto& c : inputs) {
    const auto g = gamma_g_from_gamma_c(c, p);
    const auto back = gamma_g_from_gamma_c(g, p);
    REQUIRE(back.sample_k().size() == c.sample_k().size());
    for (std::size_t i = 0; i < c.sample_k().size(); ++i) {
      const double kk = c.sample_k()[i];
      CHECK(rel(back.sample_values()[i], c.sample_values()[i]) <= 1e-12);
      const double prod = 4.0 * pi * pi * p.G * p.G / (p.hbar * p.hbar * std::pow(kk, 4));
      CHECK(rel(c.sample_values()[i] * g.sample_values()[i], prod) <= 1e-12);
    }
  }
  for (std::size_t i = 0; i < pc.sample_k().size(); ++i) {
    const double kk = pc.sample_k()[i];
    const double prod = 4.0 * pi * pi * p.G * p.G / (p.hbar * p.hbar * std::pow(kk, 4));
    CHECK(rel(pc.sample_values()[i] * pg.sample_values()[i], prod) <= 1e-12);
  }
  // Closed-form correlators map the same way.
  const auto csl = Correlator::csl_delta(1.5, 1.0);
  const auto twice = gamma_g_from_gamma_c(gamma_g_from_gamma_c(csl, p), p);
  for (double kk : {0.01, 0.5, 3.0, 30.0}) CHECK(rel(twice.value(kk), csl.value(kk)) <= 1e-12);
  const auto dp = gamma_g_from_gamma_c(Correlator::dp_coulomb(p.G, p.hbar), p);
  for (double kk : {0.01, 0.5, 3.0, 30.0}) CHECK(rel(dp.value(kk), coulomb(p, kk)) <= 1e-12);
}

TEST_CASE("least-decoherence correlators with equal smearings") {
  const auto p = params(1.7, 0.9);
  const auto k = default_k_grid();
  for (auto kind : {ProfileKind::Gaussian, ProfileKind::DpOptimal}) {
    const auto g = closed(kind);
    const auto ft = fourier_radial(g, log_k_grid(1e-3, 1.0, 64));
    if (kind == ProfileKind::DpOptimal) {
      // The bump transform changes sign at larger k; stay below its first zero.
      const auto [c, gg] = pld_correlators(ft, ft, p);
      for (std::size_t i = 0; i < c.sample_k().size(); ++i) {
        CHECK(rel(c.sample_values()[i], coulomb(p, c.sample_k()[i])) <= 1e-10);
        CHECK(rel(gg.sample_values()[i], coulomb(p, gg.sample_k()[i])) <= 1e-10);
      }
      continue;
    }
    const auto full = fourier_radial(g, k);
    const auto [c, gg] = pld_correlators(full, full, p);
    // Past k ~ 7 the numerical transform is rounding noise and is dropped.
    CHECK(c.sample_k().size() > k.size() / 2);
    CHECK(c.sample_k().back() < 10.0);
    for (std::size_t i = 0; i < c.sample_k().size(); ++i) {
      CHECK(rel(c.sample_values()[i], coulomb(p, c.sample_k()[i])) <= 1e-10);
      CHECK(rel(gg.sample_values()[i], coulomb(p, gg.sample_k()[i])) <= 1e-10);
    }
    const double ec = general_heating(c, g);
    const double eg = general_heating(gg, g);
    CHECK(rel(ec, eg) <= 1e-8);
    CHECK(ec == doctest::Approx(p.G / p.hbar * dp_energy(g)).epsilon(1e-6));
  }
  const auto s = make_spectrum(ClosedFormProfile{ProfileKind::Gaussian, 1.0});
  const auto [c, gg] = pld_correlators(s, s, p, k);
  for (double kk : {1e-3, 0.4, 3.0, 25.0, 60.0}) {
    CHECK(rel(c.value(kk), coulomb(p, kk)) <= 1e-10);
    CHECK(rel(gg.value(kk), coulomb(p, kk)) <= 1e-10);
  }
  CHECK(rel(general_heating(c, *s), general_heating(gg, *s)) <= 1e-8);
}

TEST_CASE("least-decoherence correlators for two Gaussian widths") {
  const auto p = params(1.0, 1.0);
  const auto gc = make_spectrum(ClosedFormProfile{ProfileKind::Gaussian, 1.0});
  const auto gg = make_spectrum(ClosedFormProfile{ProfileKind::Gaussian, 2.0});
  const auto [c, g] = pld_correlators(gc, gg, p, default_k_grid());
  for (double k : {0.01, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(rel(c.value(k), coulomb(p, k) * std::exp(-1.5 * k * k)) <= 1e-10);
    CHECK(rel(c.log_value(k), std::log(coulomb(p, k)) - 1.5 * k * k) <= 1e-12);
    CHECK(rel(g.value(k), coulomb(p, k) * std::exp(1.5 * k * k)) <= 1e-10);
  }
  // Each channel heats as a Coulomb kernel against the geometric-mean spectrum:
  // 2 pi (2 pi) int k^2 e^(-5 k^2 / 2) dk / (2 pi)^3.
  const double expected = 4.0 * pi * pi * std::sqrt(pi) / (4.0 * std::pow(2.5, 1.5)) / std::pow(2.0 * pi, 3);
  CHECK(general_heating(c, *gc) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(general_heating(g, *gg) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("least-decoherence correlators are undefined for the CSL bump") {
  const auto p = params(1.0, 1.0);
  const auto bump = closed(ProfileKind::CslOptimal);
  const auto gau = closed(ProfileKind::Gaussian);
  const auto k = default_k_grid();
  // First sign change of the bump transform.
  double lo = 2.0, hi = 2.6;
  REQUIRE(bump_transform(lo) * bump_transform(hi) < 0.0);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bump_transform(lo) * bump_transform(mid) <= 0.0 ? hi : lo) = mid;
  }
  try {
    pld_correlators(fourier_radial(bump, k), fourier_radial(gau, k), p);
    FAIL("expected PldUndefined");
  } catch (const PldUndefined& e) {
    REQUIRE_FALSE(e.zero_crossings().empty());
    CHECK(e.zero_crossings().front() == doctest::Approx(lo).epsilon(1e-3));
  }
  try {
    pld_correlators(make_spectrum(gau), make_spectrum(bump), p, k);
    FAIL("expected PldUndefined");
  } catch (const PldUndefined& e) {
    REQUIRE_FALSE(e.zero_crossings().empty());
    CHECK(e.zero_crossings().front() == doctest::Approx(lo).epsilon(1e-6));
  }
  CHECK_THROWS_AS(pld_correlators(make_spectrum(gau), make_spectrum(bump), p, k), Error);
}

TEST_CASE("general heating reduces to the single-model functionals") {
  for (auto kind : {ProfileKind::Gaussian, ProfileKind::CslOptimal, ProfileKind::DpOptimal}) {
    const auto g = closed(kind);
    CHECK(general_heating(Correlator::csl_delta(2.0, 0.5), g) ==
          doctest::Approx(8.0 * dirichlet_energy(g)).epsilon(1e-6));
    CHECK(general_heating(Correlator::dp_coulomb(3.0, 1.5), g) ==
          doctest::Approx(2.0 * dp_energy(g)).epsilon(1e-6));
  }
  // Linear in the correlator.
  const auto g = closed(ProfileKind::Gaussian);
  const auto k = log_k_grid(1e-4, 1e3, 800);
  std::vector<double> v;
  for (double kk : k) v.push_back(1.0 + 2.0 * pi / (kk * kk));
  const double mix = general_heating(Correlator::sampled(k, v), g);
  CHECK(mix == doctest::Approx(dirichlet_energy(g) + dp_energy(g)).epsilon(1e-4));
  // A kernel growing at small k faster than k^-3 makes the heating diverge.
  std::vector<double> steep;
  for (double kk : k) steep.push_back(std::pow(kk, -6));
  CHECK_THROWS_AS(general_heating(Correlator::sampled(k, steep), g), DivergenceError);
}

TEST_CASE("hybrid optimum with the Coulomb correlator") {
  const auto p = params(1.0, 1.0);
  const auto h = optimize_hybrid(Correlator::dp_coulomb(1.0, 1.0), 1.0, 2.0, p);
  CHECK(h.measurement_method == "dp");
  CHECK(h.feedback_method == "dp");
  CHECK(h.warnings.empty());
  CHECK(h.measurement.converged);
  CHECK(h.feedback.converged);
  CHECK(h.measurement.support_estimate == doctest::Approx(std::sqrt(7.0)).epsilon(5e-3));
  CHECK(h.feedback.support_estimate == doctest::Approx(2.0 * std::sqrt(7.0)).epsilon(5e-3));
  const double dp_min = 15.0 / (14.0 * std::pow(7.0, 1.5));
  CHECK(h.measurement.value == doctest::Approx(dp_min).epsilon(5e-3));
  CHECK(h.feedback.value == doctest::Approx(dp_min / 8.0).epsilon(5e-3));
  CHECK(h.measurement.value == doctest::Approx(general_heating(h.gamma_c, h.measurement.profile)).epsilon(1e-4));
  CHECK_THROWS_AS(optimize_hybrid(Correlator::dp_coulomb(1.0, 1.0), 0.0, 1.0, p), InvalidInput);
}

TEST_CASE("hybrid optimum with the CSL correlator") {
  const auto p = params(1.0, 1.0);
  const auto gamma = Correlator::csl_delta(2.0, 1.0);
  const auto h = optimize_hybrid(gamma, 1.0, 1.5, p);
  CHECK(h.measurement_method == "csl");
  CHECK(h.feedback_method == "gram");
  CHECK(h.warnings.empty());
  CHECK(h.measurement.converged);
  CHECK(h.measurement.value == doctest::Approx(2.0 * 35.0 / (972.0 * pi)).epsilon(5e-3));
  CHECK(h.measurement.support_estimate == doctest::Approx(3.0).epsilon(5e-3));
  // The feedback kernel c / k^4 is a Coulomb self-energy (c / 8 pi) int int g g / |x - y|.
  // At fixed variance it is minimized by the uniform ball of radius sqrt(5) r_G,
  // with value 3 c / (20 pi R).
  const double c = 4.0 * pi * pi / 2.0;
  const double R = std::sqrt(5.0) * 1.5;
  CHECK(h.feedback.converged);
  CHECK(h.feedback.value == doctest::Approx(3.0 * c / (20.0 * pi * R)).epsilon(2e-3));
  CHECK(h.feedback.value >= 3.0 * c / (20.0 * pi * R) * (1.0 - 1e-6));
  const double inside = h.feedback.profile(0.5 * R);
  CHECK(inside == doctest::Approx(3.0 / (4.0 * pi * R * R * R)).epsilon(2e-2));
  CHECK(h.feedback.profile(1.1 * R) <= 1e-3 * inside);
  CHECK(check_constraints(h.feedback.profile).variance == doctest::Approx(3.0 * 1.5 * 1.5).epsilon(1e-8));
}
