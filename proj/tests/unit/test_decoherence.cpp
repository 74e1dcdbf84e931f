#include "minheat/decoherence.hpp"
#include "minheat/error.hpp"
#include "minheat/functionals.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace minheat;
using std::numbers::pi;

namespace {

RadialProfile closed(ProfileKind kind, double r_c = 1.0) { return make_closed_form({kind, r_c}); }

// Overlap of two balls of radius R displaced by d along z, integrating
// f(|x|) f(|x - d e_z|) in cylindrical coordinates. With f a polynomial in r^2
// the integrand is polynomial in rho and z, so Gauss rules are exact.
template <class F>
double ball_overlap(F f, double R, double d) {
  using boost::math::quadrature::gauss;
  if (d >= 2.0 * R) return 0.0;
  auto slice = [&](double z) {
    const double top = std::sqrt(std::max(0.0, std::min(R * R - z * z, R * R - (z - d) * (z - d))));
    return gauss<double, 20>::integrate(
        [&](double rho) {
          return 2.0 * pi * rho * f(rho * rho + z * z) * f(rho * rho + (z - d) * (z - d));
        },
        0.0, top);
  };
  return gauss<double, 30>::integrate(slice, d - R, 0.5 * d) +
         gauss<double, 30>::integrate(slice, 0.5 * d, R);
}

double bump_F(FunctionalKind model, double s) {
  const double R = 3.0;
  auto f = [&](double r2) {
    const double q = R * R - r2;
    return model == FunctionalKind::GRW ? q : q * q;
  };
  return ball_overlap(f, R, s * R) / ball_overlap(f, R, 0.0);
}

} // namespace

TEST_CASE("overlap constants") {
  CHECK(overlap_k(closed(ProfileKind::Gaussian)) ==
        doctest::Approx(std::pow(2.0 * std::sqrt(pi), -3)).epsilon(1e-10));
  CHECK(overlap_k(closed(ProfileKind::CslOptimal)) == doctest::Approx(35.0 / (594.0 * pi)).epsilon(1e-10));
  // DpOptimal: (15 / (8 pi R^5))^2 int 4 pi r^2 (R^2 - r^2)^2 dr = 15 / (14 pi R^3).
  CHECK(overlap_k(closed(ProfileKind::DpOptimal)) ==
        doctest::Approx(15.0 / (14.0 * pi * std::pow(7.0, 1.5))).epsilon(1e-10));
  CHECK(overlap_k(closed(ProfileKind::Gaussian, 2.0)) ==
        doctest::Approx(std::pow(4.0 * std::sqrt(pi), -3)).epsilon(1e-10));
}

TEST_CASE("pair overlap") {
  const auto gau = closed(ProfileKind::Gaussian);
  const auto csl = closed(ProfileKind::CslOptimal);
  CHECK(pair_overlap(gau, 0.0) == doctest::Approx(overlap_k(gau)).epsilon(1e-12));
  CHECK(pair_overlap(csl, 0.0) == doctest::Approx(overlap_k(csl)).epsilon(1e-12));
  CHECK(pair_overlap(gau, 1.0) == doctest::Approx(overlap_k(gau) * std::exp(-0.25)).epsilon(1e-9));
  CHECK(pair_overlap(csl, 6.0) == 0.0);
  CHECK(pair_overlap(csl, 7.5) == 0.0);
  CHECK_THROWS_AS(pair_overlap(gau, -1.0), InvalidInput);
}

TEST_CASE("overlap polynomials against direct integration") {
  for (auto model : {FunctionalKind::GRW, FunctionalKind::CSL}) {
    CAPTURE(to_string(model));
    CHECK(std::abs(closed_form_F(model, 0.0) - 1.0) <= 1e-12);
    CHECK(std::abs(closed_form_F(model, 2.0)) <= 1e-9);
    CHECK(std::abs(closed_form_F(model, 2.0 - 1e-12)) <= 1e-9);
    CHECK(closed_form_F(model, 2.5) == 0.0);
    for (int i = 0; i < 20; ++i) {
      const double s = 2.0 * (i + 0.5) / 20.0;
      CAPTURE(s);
      CHECK(std::abs(closed_form_F(model, s) - bump_F(model, s)) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(closed_form_F(FunctionalKind::DP, 1.0), UnsupportedKind);
}

TEST_CASE("curves of the CSL-optimal smearing follow the polynomials") {
  const auto csl = closed(ProfileKind::CslOptimal);
  std::vector<double> ds;
  for (int i = 0; i <= 40; ++i) ds.push_back(7.0 * i / 40.0);
  const auto g = grw_curve(csl, ds);
  const auto c = csl_curve(csl, ds);
  CHECK(g.model == "grw");
  CHECK(c.model == "csl");
  REQUIRE(c.overlap_k);
  CHECK(*c.overlap_k == doctest::Approx(35.0 / (594.0 * pi)).epsilon(1e-10));
  CHECK_FALSE(g.overlap_k);
  CHECK(g.asymptote == 1.0);
  CHECK(c.asymptote == 1.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CAPTURE(ds[i]);
    CHECK(std::abs(g.rates[i] - (1.0 - closed_form_F(FunctionalKind::GRW, ds[i] / 3.0))) <= 1e-6);
    CHECK(std::abs(c.rates[i] - (1.0 - closed_form_F(FunctionalKind::CSL, ds[i] / 3.0))) <= 1e-6);
  }
  CHECK(g.rates[0] == 0.0);
  CHECK(c.rates.back() == 1.0);
}

TEST_CASE("Gaussian curves") {
  std::vector<double> ds;
  for (int i = 0; i <= 100; ++i) ds.push_back(0.1 * i);
  const auto g1 = grw_curve(closed(ProfileKind::Gaussian), ds);
  const auto c1 = csl_curve(closed(ProfileKind::Gaussian), ds);
  const auto g2 = grw_curve(closed(ProfileKind::Gaussian, 1.0 / std::sqrt(2.0)), ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double d = ds[i];
    CHECK(std::abs(g1.rates[i] - (1.0 - std::exp(-d * d / 8.0))) <= 1e-8);
    CHECK(std::abs(c1.rates[i] - (1.0 - std::exp(-d * d / 4.0))) <= 1e-8);
    CHECK(std::abs(g2.rates[i] - c1.rates[i]) <= 1e-8);
  }
}

TEST_CASE("curves start at zero and saturate monotonically") {
  std::vector<double> ds;
  for (int i = 0; i <= 60; ++i) ds.push_back(0.15 * i);
  for (auto kind : {ProfileKind::Gaussian, ProfileKind::CslOptimal, ProfileKind::DpOptimal}) {
    const auto g = closed(kind);
    for (const auto& curve : {grw_curve(g, ds), csl_curve(g, ds)}) {
      CHECK(curve.rates[0] == 0.0);
      for (std::size_t i = 1; i < ds.size(); ++i) {
        CHECK(curve.rates[i] >= curve.rates[i - 1] - 1e-12);
        CHECK(curve.rates[i] <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("rigid sphere") {
  const double R = 100.0;
  const auto rho = MassDensity::uniform_sphere(1.0, R);
  const double self = 3.0 / (4.0 * pi * R * R * R);
  CHECK(rigid_body_rate_csl(rho, 0.0, 1.0, 1.0) == 0.0);
  for (double d : {2.0 * R, 2.5 * R, 10.0 * R})
    CHECK(rigid_body_rate_csl(rho, d, 1.0, 1.0) == doctest::Approx(self).epsilon(1e-3));
  CHECK(rigid_body_rate_csl(rho, 400.0, 3.0, 0.5) == doctest::Approx(12.0 * self).epsilon(1e-3));
  // Overlap of two uniform balls: 1 - 3s/4 + s^3/16 with s = d / R.
  for (double d : {10.0, 50.0, 120.0}) {
    const double s = d / R;
    CHECK(rigid_body_rate_csl(rho, d, 1.0, 1.0) ==
          doctest::Approx(self * (0.75 * s - s * s * s / 16.0)).epsilon(1e-6));
  }
  // Same rate from the k-space form with a constant kernel.
  for (double d : {10.0, 50.0})
    CHECK(rigid_body_rate(rho, Correlator::csl_delta(1.0, 1.0), d) ==
          doctest::Approx(rigid_body_rate_csl(rho, d, 1.0, 1.0)).epsilon(1e-6));
}

TEST_CASE("rigid-body rate does not depend on the smearing shape") {
  const auto rho = MassDensity::uniform_sphere(1.0, 100.0);
  const auto a = smear(rho, closed(ProfileKind::Gaussian));
  const auto b = smear(rho, closed(ProfileKind::CslOptimal));
  for (double d : {10.0, 50.0, 100.0, 200.0, 400.0}) {
    CAPTURE(d);
    const double ra = rigid_body_rate_csl(a, d, 1.0, 1.0);
    const double rb = rigid_body_rate_csl(b, d, 1.0, 1.0);
    CHECK(std::abs(ra / rb - 1.0) <= 1e-2);
  }
}

TEST_CASE("hybrid single-particle curve with least-decoherence correlators") {
  ModelParams p;
  const auto g = make_spectrum(ClosedFormProfile{ProfileKind::Gaussian, 1.0});
  const auto [gc, gg] = pld_correlators(g, g, p, default_k_grid());
  for (double k : {0.01, 0.3, 1.0, 2.5, 6.0}) {
    const auto h = hybrid_integrand(gc, gg, *g, *g, k);
    CHECK(h.measurement == doctest::Approx(h.feedback).epsilon(1e-12));
  }
  const std::vector<double> ds{0.0, 1.0, 5.0, 50.0, 200.0};
  const auto curve = hybrid_single_particle_curve(gc, *g, *g, 1.0, ds, p);
  CHECK(curve.model == "hybrid");
  CHECK(curve.rates[0] == 0.0);
  // k^2 gamma |g~|^2 = (2 pi G / hbar) e^(-k^2) / (2 pi)^3 per channel: the
  // asymptote is 4 pi * 2 * (2 pi)^-2 * sqrt(pi) / 2 = 1 / sqrt(pi).
  CHECK(curve.asymptote == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-9));
  // Gamma(d) = (2 / pi) int_0^inf e^(-k^2) [1 - j0(k d)] dk, whose j0 part is
  // pi / (2 d) to within e^(-d^2 / 4) corrections.
  CHECK(curve.rates[3] == doctest::Approx(1.0 / std::sqrt(pi) - 1.0 / 50.0).epsilon(1e-9));
  CHECK(curve.rates[4] == doctest::Approx(1.0 / std::sqrt(pi) - 1.0 / 200.0).epsilon(1e-9));
  CHECK(std::abs(curve.rates[4] / curve.asymptote - 1.0) <= 1e-2);
  // The mass enters squared.
  const auto heavy = hybrid_single_particle_curve(gc, *g, *g, 3.0, ds, p);
  CHECK(heavy.rates[2] == doctest::Approx(9.0 * curve.rates[2]).epsilon(1e-12));
}

TEST_CASE("hybrid curve with a CSL measurement correlator") {
  ModelParams p;
  const auto g = closed(ProfileKind::Gaussian);
  const auto curve = hybrid_single_particle_curve(Correlator::csl_delta(1.0, 1.0), g, g, 1.0,
                                                  {0.0, 1.0, 5.0}, p);
  // The feedback term grows like k^-2 at small k, so coherence at large
  // separation decays without bound.
  CHECK(std::isinf(curve.asymptote));
  CHECK(curve.rates[0] == 0.0);
  CHECK(curve.rates[2] > curve.rates[1]);
  CHECK(std::isfinite(curve.rates[2]));

  CHECK_THROWS_AS(Correlator::sampled({0.1, 1.0, 10.0}, {1.0, 0.0, 3.0}), InversionError);
}
