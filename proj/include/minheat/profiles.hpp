#pragma once

#include "minheat/grid.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minheat {

// Non-negative radial function sampled on a RadialGrid. Lengths are in units
// of the smearing length, values in inverse volume. Between nodes the profile
// is the panel interpolant; beyond the grid (or the support radius) it is 0.
class RadialProfile {
public:
  // Zero profile on [0, 1].
  RadialProfile() : RadialProfile(RadialGrid({0.0, 1.0}, 2), {0.0, 0.0}) {}
  RadialProfile(RadialGrid grid, std::vector<double> values,
                std::optional<double> support_radius = std::nullopt);

  // Samples fn at the grid nodes (negative roundoff is clamped to zero).
  static RadialProfile sample(RadialGrid grid, const std::function<double(double)>& fn,
                              std::optional<double> support_radius = std::nullopt);

  const RadialGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::optional<double> support_radius() const { return support_; }
  double r_max() const { return grid_.r_max(); }

  double operator()(double r) const;
  double derivative(double r) const;

  // Nodal values of the derivative within one panel.
  std::vector<double> panel_derivative(std::size_t panel) const;

  // Sum over panels of the panel Gauss rule applied to fn(r, g(r), g'(r)).
  template <class Fn>
  double integrate(Fn&& fn) const;

  // Same grid, values transformed nodewise.
  RadialProfile map(const std::function<double(double)>& fn) const;

private:
  RadialGrid grid_;
  std::vector<double> values_;
  std::optional<double> support_;
};

enum class ProfileKind { Gaussian, CslOptimal, DpOptimal };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

// Analytic smearing families, all normalized with variance 3 r_c^2.
struct ClosedFormProfile {
  ProfileKind kind = ProfileKind::Gaussian;
  double r_c = 1.0;

  double operator()(double r) const;
  std::optional<double> support_radius() const;
  // Radius beyond which the profile is treated as zero when sampled.
  double default_r_max() const;
};

// Non-compact profiles are sampled out to this many smearing lengths by default.
inline constexpr double kDefaultTailLength = 10.0;
// Panel order used when sampling closed forms.
inline constexpr int kDefaultPanelOrder = 8;

// Samples a closed form with at least n_points nodes on [0, r_max]; compact
// kinds get a panel boundary at their support radius.
RadialProfile make_closed_form(const ClosedFormProfile& profile, std::size_t n_points,
                               double r_max);
RadialProfile make_closed_form(const ClosedFormProfile& profile, std::size_t n_points = 281);

struct Moments {
  double norm = 0.0;      // 4 pi int r^2 g dr
  double variance = 0.0;  // 4 pi int r^4 g dr / norm
};

Moments check_constraints(const RadialProfile& p);

// h(r) = alpha^3 g(alpha r); exact on the rescaled grid.
RadialProfile rescale(const RadialProfile& p, double alpha);

// Radial symmetric-decreasing rearrangement, returned on the input grid (plus
// a breakpoint at the new support edge when it falls inside the grid).
RadialProfile decreasing_rearrangement(const RadialProfile& p);

// Rearrangement followed by the rescale that restores the variance of p.
RadialProfile rearrange_and_rescale(const RadialProfile& p);

// 4 pi int r^2 (f - h)^2 dr, with f and h evaluated through their interpolants
// on the union of both grids' breakpoints.
double l2_distance(const RadialProfile& f, const std::function<double(double)>& h,
                   std::span<const double> extra_breaks = {});

// Support edge from the last positive nodes, extrapolating g^(1/contact_order)
// linearly to zero (contact_order 2 for a quadratic touchdown, 1 for a kink).
double estimate_support_edge(const RadialProfile& p, int contact_order);

// Mass density of a rigid body (radial). Values are mass per volume.
class MassDensity {
public:
  MassDensity(RadialProfile density);

  static MassDensity uniform_sphere(double total_mass, double radius, std::size_t n_panels = 64,
                                    int order = kDefaultPanelOrder);

  const RadialProfile& profile() const { return density_; }
  double total_mass() const { return total_mass_; }

private:
  RadialProfile density_;
  double total_mass_;
};

// Mass density convolved with a smearing distribution.
MassDensity smear(const MassDensity& rho, const RadialProfile& g, std::size_t n_panels = 0);

// ---------------------------------------------------------------------------

template <class Fn>
double RadialProfile::integrate(Fn&& fn) const {
  const auto& b = grid_.basis();
  const std::size_t p = static_cast<std::size_t>(b.order);
  const std::size_t m = b.gauss_nodes.size();
  double total = 0.0;
  for (std::size_t j = 0; j < grid_.panel_count(); ++j) {
    const double lo = grid_.panel_lo(j);
    const double hi = grid_.panel_hi(j);
    const double half = 0.5 * (hi - lo);
    const double* v = values_.data() + grid_.first_node(j);
    double panel = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      double g = 0.0;
      double dg = 0.0;
      for (std::size_t l = 0; l < p; ++l) {
        g += b.gauss_interp[q * p + l] * v[l];
        dg += b.gauss_deriv[q * p + l] * v[l];
      }
      const double r = lo + half * (1.0 + b.gauss_nodes[q]);
      panel += b.gauss_weights[q] * fn(r, g, dg / half);
    }
    total += half * panel;
  }
  return total;
}

} // namespace minheat
