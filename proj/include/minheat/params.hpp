#pragma once

#include <vector>

namespace minheat {

// GRW collapse rate and mass of one constituent.
struct Particle {
  double lambda = 1.0;
  double mass = 1.0;
};

// Physical constants entering the model prefactors. The library is unit
// agnostic: any consistent system works, defaults are all 1 (r_C = hbar =
// G = m0 = 1). Lengths inside profiles are in units of r_C, so a geometric
// value carries r_C^-2 (GRW), r_C^-5 (CSL) or r_C^-3 (DP).
struct ModelParams {
  double G = 1.0;
  double hbar = 1.0;
  double m0 = 1.0;         // CSL reference mass
  double gamma_csl = 1.0;  // CSL rate constant gamma (lambda_CSL = gamma K)
  std::vector<Particle> particles{Particle{}};
  double total_mass = 1.0;  // M

  // Throws InvalidInput unless every constant is strictly positive.
  void validate() const;
};

} // namespace minheat
