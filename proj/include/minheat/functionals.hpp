#pragma once

#include "minheat/params.hpp"
#include "minheat/profiles.hpp"

#include <cstddef>
#include <string>

namespace minheat {

// GRW evaluates I[sqrt g], CSL evaluates I[g], DP evaluates I_DP[g].
enum class FunctionalKind { GRW, CSL, DP };

std::string to_string(FunctionalKind kind);
FunctionalKind functional_kind_from_string(const std::string& name);

// I[f] = 1/2 int |grad f|^2 d^3x = 2 pi int r^2 f'(r)^2 dr.
double dirichlet_energy(const RadialProfile& f);

// I_DP[g] = pi int g^2 d^3x.
double dp_energy(const RadialProfile& g);

// I_DP[g] from the Coulomb form 1/4 int int |x-y|^-1 grad g(x) . grad g(y).
// For radial g only the dipole term of the kernel survives the angular
// integrals, leaving
//   I_DP = (8 pi^2 / 3) int_0^inf g'(r) int_0^r s^3 g'(s) ds dr,
// integrated as a nested quadrature over the triangle s < r on the profile
// panels merged with n_panels uniform panels.
double dp_energy_coulomb(const RadialProfile& g, std::size_t n_panels = 64);

// sqrt(g) resampled at the nodes of `grid`.
RadialProfile sqrt_profile(const RadialProfile& g, const RadialGrid& grid);
RadialProfile sqrt_profile(const RadialProfile& g);

struct HeatingValue {
  FunctionalKind kind = FunctionalKind::CSL;
  double geometric_value = 0.0;
  bool divergent = false;
  std::size_t grid_points = 0;
  double est_error = 0.0;
};

// Geometric factor of the heating rate, evaluated on the profile grid and on
// two successive panel doublings. Flagged divergent when the value grows by
// more than 10% at both doublings, or when both increments are non-negligible
// and the second is nearly as large as the first (a logarithmic divergence).
HeatingValue evaluate_heating(FunctionalKind kind, const RadialProfile& g);

// Multiplies by the model prefactor: GRW hbar^2 sum_j lambda_j / m_j,
// CSL M gamma hbar^2 / m0^2, DP M hbar G. Throws DivergenceError for a
// divergent geometric value.
double physical_heating_rate(FunctionalKind kind, const HeatingValue& geometric,
                             const ModelParams& params);

} // namespace minheat
