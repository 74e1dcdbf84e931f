#include "minheat/convolution.hpp"

#include "minheat/error.hpp"
#include "minheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace minheat {

RadialFirstMoment::RadialFirstMoment(const RadialProfile& f) {
  const auto& grid = f.grid();
  const auto& basis = grid.basis();
  const auto p = static_cast<std::size_t>(basis.order);
  breaks_.assign(grid.breaks().begin(), grid.breaks().end());
  cumulative_.assign(breaks_.size(), 0.0);
  antider_.resize(grid.panel_count());
  mid_.resize(grid.panel_count());
  half_.resize(grid.panel_count());
  for (std::size_t j = 0; j < grid.panel_count(); ++j) {
    const double mid = 0.5 * (grid.panel_lo(j) + grid.panel_hi(j));
    const double half = 0.5 * (grid.panel_hi(j) - grid.panel_lo(j));
    mid_[j] = mid;
    half_[j] = half;
    const auto c = panel_monomial(basis, f.values().data() + grid.first_node(j));
    // s f(s) ds = (mid + half x) f(x) half dx, a polynomial of degree p in x.
    std::vector<double> integrand(p + 1, 0.0);
    for (std::size_t n = 0; n < p; ++n) {
      integrand[n] += mid * half * c[n];
      integrand[n + 1] += half * half * c[n];
    }
    std::vector<double> a(p + 2, 0.0);
    for (std::size_t n = 0; n <= p; ++n) a[n + 1] = integrand[n] / static_cast<double>(n + 1);
    // Shift so the antiderivative vanishes at x = -1.
    double at_lo = 0.0;
    for (std::size_t n = a.size(); n-- > 0;) at_lo = at_lo * -1.0 + a[n];
    a[0] -= at_lo;
    double at_hi = 0.0;
    for (std::size_t n = a.size(); n-- > 0;) at_hi = at_hi + a[n];
    cumulative_[j + 1] = cumulative_[j] + at_hi;
    antider_[j] = std::move(a);
  }
}

double RadialFirstMoment::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= breaks_.back()) return cumulative_.back();
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const auto j = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  const double x = (t - mid_[j]) / half_[j];
  const auto& a = antider_[j];
  double v = 0.0;
  for (std::size_t n = a.size(); n-- > 0;) v = v * x + a[n];
  return cumulative_[j] + v;
}

double radial_convolution(const RadialProfile& f, const RadialProfile& h, double d) {
  return radial_convolution(f, h, RadialFirstMoment(h), d);
}

double radial_convolution(const RadialProfile& f, const RadialProfile& h,
                          const RadialFirstMoment& moment_h, double d) {
  if (d < 0.0) throw InvalidInput("radial_convolution: negative shift");
  const double f_end = f.r_max();
  const double h_end = h.r_max();
  if (d == 0.0) {
    return 4.0 * std::numbers::pi *
           f.integrate([&](double r, double g, double) { return r * r * g * h(r); });
  }
  if (d >= f_end + h_end) return 0.0;

  // Kinks of r -> S_h(r + d) - S_h(|r - d|) inside [0, f_end].
  std::vector<double> cuts(f.grid().breaks().begin(), f.grid().breaks().end());
  auto add = [&](double x) {
    if (x > 0.0 && x < f_end) cuts.push_back(x);
  };
  add(d);
  for (double b : h.grid().breaks()) {
    add(b - d);
    add(b + d);
    add(d - b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-14 * (1.0 + b); }),
             cuts.end());

  const int m = f.grid().order() + 3;
  const auto& rule = gauss_legendre(m);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    // Segments where r + d and |r - d| both fall beyond h contribute nothing.
    if (lo - d >= h_end) continue;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double seg = 0.0;
    for (int q = 0; q < m; ++q) {
      const double r = mid + half * rule.nodes[q];
      const double fr = f(r);
      if (fr == 0.0) continue;
      seg += rule.weights[q] * r * fr * (moment_h(r + d) - moment_h(std::abs(r - d)));
    }
    total += half * seg;
  }
  return 2.0 * std::numbers::pi * total / d;
}

} // namespace minheat
