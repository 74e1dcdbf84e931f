#include "minheat/functionals.hpp"

#include "minheat/error.hpp"
#include "minheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace minheat {

using std::numbers::pi;

void ModelParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidInput(std::string(name) + " must be positive and finite");
  };
  check(G, "G");
  check(hbar, "hbar");
  check(m0, "m0");
  check(gamma_csl, "gamma_csl");
  check(total_mass, "total mass");
  if (particles.empty()) throw InvalidInput("at least one particle is required");
  for (const auto& p : particles) {
    check(p.lambda, "particle lambda");
    check(p.mass, "particle mass");
  }
}

std::string to_string(FunctionalKind kind) {
  switch (kind) {
  case FunctionalKind::GRW:
    return "grw";
  case FunctionalKind::CSL:
    return "csl";
  case FunctionalKind::DP:
    return "dp";
  }
  return "unknown";
}

FunctionalKind functional_kind_from_string(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "grw") return FunctionalKind::GRW;
  if (s == "csl") return FunctionalKind::CSL;
  if (s == "dp") return FunctionalKind::DP;
  throw InvalidInput("unknown functional kind '" + name + "' (expected grw, csl or dp)");
}

double dirichlet_energy(const RadialProfile& f) {
  return 2.0 * pi * f.integrate([](double r, double, double df) { return r * r * df * df; });
}

double dp_energy(const RadialProfile& g) {
  return pi * 4.0 * pi * g.integrate([](double r, double v, double) { return r * r * v * v; });
}

double dp_energy_coulomb(const RadialProfile& g, std::size_t n_panels) {
  const double r_max = g.r_max();
  std::vector<double> cuts(g.grid().breaks().begin(), g.grid().breaks().end());
  for (std::size_t i = 1; i < n_panels; ++i)
    cuts.push_back(r_max * static_cast<double>(i) / static_cast<double>(n_panels));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return std::abs(a - b) <= 1e-13 * r_max; }),
             cuts.end());

  const auto& rule = gauss_legendre(g.grid().order() + 2);
  auto inner = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = lo + half * (1.0 + rule.nodes[q]);
      s += rule.weights[q] * x * x * x * g.derivative(x);
    }
    return half * s;
  };

  double a_cum = 0.0;  // int_0^{cut} s^3 g'(s) ds
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = lo + half * (1.0 + rule.nodes[q]);
      s += rule.weights[q] * g.derivative(r) * (a_cum + inner(lo, r));
    }
    total += half * s;
    a_cum += inner(lo, hi);
  }
  return 8.0 * pi * pi / 3.0 * total;
}

RadialProfile sqrt_profile(const RadialProfile& g, const RadialGrid& grid) {
  return RadialProfile::sample(grid, [&](double r) { return std::sqrt(std::max(g(r), 0.0)); },
                               g.support_radius());
}

RadialProfile sqrt_profile(const RadialProfile& g) {
  return g.map([](double v) { return std::sqrt(v); });
}

HeatingValue evaluate_heating(FunctionalKind kind, const RadialProfile& g) {
  double v[3];
  std::size_t points = 0;
  for (int level = 0; level < 3; ++level) {
    const auto grid = g.grid().refined(1 << level);
    points = grid.size();
    switch (kind) {
    case FunctionalKind::GRW:
      v[level] = dirichlet_energy(sqrt_profile(g, grid));
      break;
    case FunctionalKind::CSL:
      v[level] = dirichlet_energy(RadialProfile::sample(grid, g, g.support_radius()));
      break;
    case FunctionalKind::DP:
      v[level] = dp_energy(RadialProfile::sample(grid, g, g.support_radius()));
      break;
    }
  }
  HeatingValue h;
  h.kind = kind;
  h.geometric_value = v[2];
  h.grid_points = points;
  h.est_error = std::abs(v[2] - v[1]);
  // Growth of more than 10% per doubling, or increments that do not shrink
  // (a convergent sequence of order q has d2/d1 = 2^-q <= 1/2; a logarithmic
  // divergence keeps d2/d1 near 1).
  const double d1 = v[1] - v[0];
  const double d2 = v[2] - v[1];
  const bool fast = v[1] > 1.1 * v[0] && v[2] > 1.1 * v[1];
  const bool steady = d1 > 1e-6 * std::abs(v[2]) && d2 >= 0.9 * d1;
  h.divergent = fast || steady;
  if (h.divergent) h.est_error = INFINITY;
  return h;
}

double physical_heating_rate(FunctionalKind kind, const HeatingValue& geometric,
                             const ModelParams& params) {
  params.validate();
  if (geometric.divergent || !std::isfinite(geometric.geometric_value))
    throw DivergenceError("the " + to_string(kind) +
                          " heating functional diverges for this profile; the rate is infinite");
  const double h2 = params.hbar * params.hbar;
  switch (kind) {
  case FunctionalKind::GRW: {
    double s = 0.0;
    for (const auto& p : params.particles) s += p.lambda / p.mass;
    return h2 * s * geometric.geometric_value;
  }
  case FunctionalKind::CSL:
    return params.total_mass * params.gamma_csl * h2 / (params.m0 * params.m0) *
           geometric.geometric_value;
  case FunctionalKind::DP:
    return params.total_mass * params.hbar * params.G * geometric.geometric_value;
  }
  return 0.0;
}

} // namespace minheat
