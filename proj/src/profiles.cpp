#include "minheat/profiles.hpp"

#include "minheat/convolution.hpp"
#include "minheat/error.hpp"
#include "minheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace minheat {

using std::numbers::pi;

RadialProfile::RadialProfile(RadialGrid grid, std::vector<double> values,
                             std::optional<double> support_radius)
    : grid_(std::move(grid)), values_(std::move(values)), support_(support_radius) {
  if (values_.size() != grid_.size())
    throw InvalidInput("profile has " + std::to_string(values_.size()) + " values for " +
                       std::to_string(grid_.size()) + " grid nodes");
  const auto nodes = grid_.nodes();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw InvalidInput("profile value at r = " + std::to_string(nodes[i]) + " is not finite");
    if (values_[i] < 0.0)
      throw InvalidInput("profile value at r = " + std::to_string(nodes[i]) + " is negative");
  }
  if (support_) {
    if (!(*support_ > 0.0)) throw InvalidInput("support radius must be positive");
    const double tol = 1e-12 * std::max(1.0, *support_);
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (nodes[i] > *support_ + tol && values_[i] != 0.0)
        throw InvalidInput("profile is nonzero beyond its support radius");
  }
}

RadialProfile RadialProfile::sample(RadialGrid grid, const std::function<double(double)>& fn,
                                    std::optional<double> support_radius) {
  std::vector<double> v(grid.size());
  const auto nodes = grid.nodes();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = fn(nodes[i]);
    v[i] = x > 0.0 ? x : 0.0;
    if (support_radius && nodes[i] > *support_radius) v[i] = 0.0;
  }
  return RadialProfile(std::move(grid), std::move(v), support_radius);
}

double RadialProfile::operator()(double r) const {
  if (r < 0.0) r = -r;
  if (r > grid_.r_max()) return 0.0;
  if (support_ && r > *support_) return 0.0;
  const std::size_t j = grid_.find_panel(r);
  const auto& b = grid_.basis();
  const double lo = grid_.panel_lo(j);
  const double hi = grid_.panel_hi(j);
  const double x = (2.0 * r - lo - hi) / (hi - lo);
  return barycentric_eval(b.nodes, b.bary,
                          std::span<const double>(values_.data() + grid_.first_node(j),
                                                  static_cast<std::size_t>(b.order)),
                          x);
}

double RadialProfile::derivative(double r) const {
  if (r < 0.0 || r > grid_.r_max()) return 0.0;
  if (support_ && r > *support_) return 0.0;
  const std::size_t j = grid_.find_panel(r);
  const auto& b = grid_.basis();
  const auto d = panel_derivative(j);
  const double lo = grid_.panel_lo(j);
  const double hi = grid_.panel_hi(j);
  const double x = (2.0 * r - lo - hi) / (hi - lo);
  return barycentric_eval(b.nodes, b.bary, d, x);
}

std::vector<double> RadialProfile::panel_derivative(std::size_t panel) const {
  const auto& b = grid_.basis();
  const auto p = static_cast<std::size_t>(b.order);
  const double scale = 2.0 / (grid_.panel_hi(panel) - grid_.panel_lo(panel));
  const double* v = values_.data() + grid_.first_node(panel);
  std::vector<double> d(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += b.diff[i * p + j] * v[j];
    d[i] = s * scale;
  }
  return d;
}

RadialProfile RadialProfile::map(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), fn);
  return RadialProfile(grid_, std::move(v), support_);
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
  case ProfileKind::Gaussian:
    return "gaussian";
  case ProfileKind::CslOptimal:
    return "csl";
  case ProfileKind::DpOptimal:
    return "dp";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "gaussian" || name == "grw") return ProfileKind::Gaussian;
  if (name == "csl" || name == "csl-optimal") return ProfileKind::CslOptimal;
  if (name == "dp" || name == "dp-optimal") return ProfileKind::DpOptimal;
  throw InvalidInput("unknown profile kind '" + name + "' (expected gaussian, csl or dp)");
}

double ClosedFormProfile::operator()(double r) const {
  const double x2 = r * r;
  switch (kind) {
  case ProfileKind::Gaussian:
    return std::pow(2.0 * pi * r_c * r_c, -1.5) * std::exp(-x2 / (2.0 * r_c * r_c));
  case ProfileKind::CslOptimal: {
    const double R = 3.0 * r_c;
    const double t = std::max(R * R - x2, 0.0);
    return 105.0 / (32.0 * pi * std::pow(R, 7)) * t * t;
  }
  case ProfileKind::DpOptimal: {
    const double R = std::sqrt(7.0) * r_c;
    return 15.0 / (8.0 * pi * std::pow(R, 5)) * std::max(R * R - x2, 0.0);
  }
  }
  return 0.0;
}

std::optional<double> ClosedFormProfile::support_radius() const {
  switch (kind) {
  case ProfileKind::Gaussian:
    return std::nullopt;
  case ProfileKind::CslOptimal:
    return 3.0 * r_c;
  case ProfileKind::DpOptimal:
    return std::sqrt(7.0) * r_c;
  }
  return std::nullopt;
}

double ClosedFormProfile::default_r_max() const {
  if (auto s = support_radius()) return *s;
  return kDefaultTailLength * r_c;
}

RadialProfile make_closed_form(const ClosedFormProfile& profile, std::size_t n_points,
                               double r_max) {
  if (n_points < 2) throw InvalidInput("make_closed_form: need at least 2 points");
  if (!(profile.r_c > 0.0)) throw InvalidInput("make_closed_form: r_c must be positive");
  if (!(r_max > 0.0)) throw InvalidInput("make_closed_form: r_max must be positive");
  const auto support = profile.support_radius();
  if (support && r_max < *support * (1.0 - 1e-12))
    throw DomainTruncation("make_closed_form: r_max " + std::to_string(r_max) +
                           " truncates the support radius " + std::to_string(*support));
  std::vector<double> ends;
  if (support && r_max > *support * (1.0 + 1e-12)) ends = {*support, r_max};
  else ends = {support ? *support : r_max};
  const int order = kDefaultPanelOrder;
  const std::size_t wanted = (n_points - 1 + order - 2) / static_cast<std::size_t>(order - 1);
  const std::size_t panels = std::max(wanted, ends.size());
  auto grid = RadialGrid::segmented(ends, panels, order);
  return RadialProfile::sample(std::move(grid), profile, support);
}

RadialProfile make_closed_form(const ClosedFormProfile& profile, std::size_t n_points) {
  return make_closed_form(profile, n_points, profile.default_r_max());
}

Moments check_constraints(const RadialProfile& p) {
  Moments m;
  m.norm = 4.0 * pi * p.integrate([](double r, double g, double) { return r * r * g; });
  const double fourth = 4.0 * pi * p.integrate([](double r, double g, double) {
    const double r2 = r * r;
    return r2 * r2 * g;
  });
  m.variance = m.norm > 0.0 ? fourth / m.norm : 0.0;
  return m;
}

RadialProfile rescale(const RadialProfile& p, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidInput("rescale: alpha must be positive, got " + std::to_string(alpha));
  const double a3 = alpha * alpha * alpha;
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double& x : v) x *= a3;
  std::optional<double> support;
  if (p.support_radius()) support = *p.support_radius() / alpha;
  return RadialProfile(p.grid().scaled(1.0 / alpha), std::move(v), support);
}

namespace {

constexpr int kShellsPerPanel = 96;

struct Shell {
  double value;
  double volume;
};

} // namespace

RadialProfile decreasing_rearrangement(const RadialProfile& p) {
  const auto& grid = p.grid();
  const auto& rule = gauss_legendre(4);
  std::vector<Shell> shells;
  shells.reserve(grid.panel_count() * kShellsPerPanel);
  for (std::size_t j = 0; j < grid.panel_count(); ++j) {
    const double lo = grid.panel_lo(j);
    const double hi = grid.panel_hi(j);
    for (int s = 0; s < kShellsPerPanel; ++s) {
      const double a = lo + (hi - lo) * s / kShellsPerPanel;
      const double b = s + 1 == kShellsPerPanel ? hi : lo + (hi - lo) * (s + 1) / kShellsPerPanel;
      const double volume = 4.0 * pi / 3.0 * (b * b * b - a * a * a);
      double mass = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
        mass += rule.weights[q] * r * r * std::max(p(r), 0.0);
      }
      mass *= 0.5 * (b - a) * 4.0 * pi;
      shells.push_back({volume > 0.0 ? mass / volume : 0.0, volume});
    }
  }
  std::stable_sort(shells.begin(), shells.end(),
                   [](const Shell& x, const Shell& y) { return x.value > y.value; });

  // Interpolation table: value at each shell's volume midpoint radius, then
  // a closing zero at the edge of the positive set.
  std::vector<double> radius;
  std::vector<double> value;
  double cum = 0.0;
  double positive_volume = 0.0;
  for (const auto& s : shells) {
    if (!(s.value > 0.0)) break;
    const double mid = cum + 0.5 * s.volume;
    radius.push_back(std::cbrt(3.0 * mid / (4.0 * pi)));
    value.push_back(s.value);
    cum += s.volume;
    positive_volume = cum;
  }
  const double edge = std::cbrt(3.0 * positive_volume / (4.0 * pi));
  const double r_max = grid.r_max();
  std::optional<double> support;
  std::vector<double> breaks(grid.breaks().begin(), grid.breaks().end());
  if (radius.empty()) {
    return RadialProfile(grid, std::vector<double>(grid.size(), 0.0));
  }
  if (edge < r_max * (1.0 - 1e-12)) {
    support = edge;
    radius.push_back(edge);
    value.push_back(0.0);
    const bool present = std::any_of(breaks.begin(), breaks.end(), [&](double b) {
      return std::abs(b - edge) <= 1e-12 * r_max;
    });
    if (!present) {
      breaks.push_back(edge);
      std::sort(breaks.begin(), breaks.end());
    }
  }
  RadialGrid out_grid(std::move(breaks), grid.order());
  const auto nodes = out_grid.nodes();
  std::vector<double> out(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double r = nodes[i];
    if (support && r > *support) continue;
    if (r <= radius.front()) {
      out[i] = value.front();
      continue;
    }
    if (r >= radius.back()) {
      out[i] = value.back();
      continue;
    }
    const auto it = std::upper_bound(radius.begin(), radius.end(), r);
    const auto k = static_cast<std::size_t>(it - radius.begin());
    const double t = (r - radius[k - 1]) / (radius[k] - radius[k - 1]);
    out[i] = (1.0 - t) * value[k - 1] + t * value[k];
  }
  // The high-order interpolant smooths the kinks that level sets of a
  // non-monotone input leave in g*; restore the mass it moves.
  RadialProfile star(out_grid, out, support);
  const double mass = check_constraints(star).norm;
  const double target = check_constraints(p).norm;
  if (mass > 0.0)
    for (double& v : out) v *= target / mass;
  return RadialProfile(std::move(out_grid), std::move(out), support);
}

RadialProfile rearrange_and_rescale(const RadialProfile& p) {
  const auto target = check_constraints(p);
  auto star = decreasing_rearrangement(p);
  const auto got = check_constraints(star);
  if (!(got.variance > 0.0) || !(target.variance > 0.0)) return star;
  return rescale(star, std::sqrt(got.variance / target.variance));
}

double l2_distance(const RadialProfile& f, const std::function<double(double)>& h,
                   std::span<const double> extra_breaks) {
  std::vector<double> cuts(f.grid().breaks().begin(), f.grid().breaks().end());
  for (double b : extra_breaks)
    if (b > 0.0) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto& rule = gauss_legendre(16);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[q];
      const double diff = f(r) - h(r);
      s += rule.weights[q] * r * r * diff * diff;
    }
    total += 0.5 * (hi - lo) * s;
  }
  return std::sqrt(4.0 * pi * total);
}

double estimate_support_edge(const RadialProfile& p, int contact_order) {
  if (contact_order < 1) throw InvalidInput("contact order must be at least 1");
  const auto v = p.values();
  const auto r = p.grid().nodes();
  const double peak = *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0)) return 0.0;
  const double floor = 1e-13 * peak;
  std::size_t last = v.size();
  for (std::size_t i = v.size(); i-- > 0;)
    if (v[i] > floor) {
      last = i;
      break;
    }
  if (last + 1 >= v.size() || last == 0) return r[last];
  const double e = 1.0 / contact_order;
  const double t1 = std::pow(v[last], e);
  const double t0 = std::pow(v[last - 1], e);
  if (!(t0 > t1)) return r[last + 1];
  const double edge = r[last] + t1 * (r[last] - r[last - 1]) / (t0 - t1);
  return std::clamp(edge, r[last], r[last + 1]);
}

MassDensity::MassDensity(RadialProfile density)
    : density_(std::move(density)), total_mass_(check_constraints(density_).norm) {}

MassDensity MassDensity::uniform_sphere(double total_mass, double radius, std::size_t n_panels,
                                        int order) {
  if (!(total_mass > 0.0) || !(radius > 0.0))
    throw InvalidInput("uniform_sphere: mass and radius must be positive");
  const double rho0 = 3.0 * total_mass / (4.0 * pi * radius * radius * radius);
  const double ends[] = {radius};
  auto grid = RadialGrid::segmented(ends, std::max<std::size_t>(n_panels, 1), order);
  std::vector<double> v(grid.size(), rho0);
  return MassDensity(RadialProfile(std::move(grid), std::move(v), radius));
}

MassDensity smear(const MassDensity& rho, const RadialProfile& g, std::size_t n_panels) {
  const auto& body = rho.profile();
  const double body_end = body.support_radius().value_or(body.r_max());
  const double width = g.support_radius().value_or(g.r_max());
  const double out_end = body_end + width;
  // Fine panels across the smeared edge, coarse ones in the interior.
  const double inner = std::max(0.0, body_end - width);
  const std::size_t edge_panels = n_panels > 0 ? n_panels
                                               : static_cast<std::size_t>(std::ceil(2.0 * width / 0.25));
  std::vector<double> breaks{0.0};
  if (inner > 0.0) {
    const std::size_t n_inner = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(inner / std::max(width, inner / 32.0))));
    for (std::size_t i = 1; i <= n_inner; ++i) breaks.push_back(inner * i / n_inner);
  }
  const double lo = inner;
  for (std::size_t i = 1; i <= edge_panels; ++i) breaks.push_back(lo + (out_end - lo) * i / edge_panels);
  RadialGrid grid(std::move(breaks), kDefaultPanelOrder);
  const RadialFirstMoment moment(body);
  std::vector<double> v(grid.size());
  const auto nodes = grid.nodes();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::max(0.0, radial_convolution(g, body, moment, nodes[i]));
  return MassDensity(RadialProfile(std::move(grid), std::move(v), out_end));
}

} // namespace minheat
