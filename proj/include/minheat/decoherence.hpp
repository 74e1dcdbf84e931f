#pragma once

#include "minheat/hybrid.hpp"
#include "minheat/profiles.hpp"

#include <optional>
#include <string>
#include <vector>

namespace minheat {

// Gamma(d_i) in units of the model's rate constant.
struct DecoherenceCurve {
  std::string model;
  std::vector<double> d;
  std::vector<double> rates;
  double asymptote = 1.0;  // infinite when the rate grows without bound
  // What the rates are measured in, e.g. "lambda_GRW m/m0".
  std::string rate_constant;
  // CSL curves: K = int g^2, so that lambda_CSL = gamma_CSL K.
  std::optional<double> overlap_k;
};

// K = int g^2 d^3x.
double overlap_k(const RadialProfile& g);

// int f(x) f(x + d) d^3x.
double pair_overlap(const RadialProfile& f, double d);

// Gamma_GRW / (lambda m/m0) = 1 - int sqrt(g(x)) sqrt(g(x + d)).
DecoherenceCurve grw_curve(const RadialProfile& g, const std::vector<double>& ds);

// Gamma_CSL / (gamma K (m/m0)^2) = 1 - int g(x) g(x + d) / K.
DecoherenceCurve csl_curve(const RadialProfile& g, const std::vector<double>& ds);

// Overlap polynomials of the CSL-optimal smearing, s = d / R:
//   GRW: 1 - 7/4 s^2 + 35/32 s^3 - 7/64 s^5 + 3/512 s^7,
//   CSL: 1 - 11/6 s^2 + 33/16 s^4 - 77/64 s^5 + 33/256 s^7 - 11/1024 s^9 + 5/12288 s^11,
// both cut off at s = 2.
double closed_form_F(FunctionalKind model, double s);

// Centre-of-mass decoherence rate of a rigid body with mass density rho.
// CSL delta correlator: (gamma / m0^2) [int rho^2 - int rho(x) rho(x + d)].
double rigid_body_rate_csl(const MassDensity& rho, double d, double gamma_csl, double m0);
// General kernel D: int rho(z) int D(z - z') [rho(z') - rho(z' + d)]
//   = 4 pi int_0^inf k^2 D^(k) |rho~(k)|^2 [1 - j0(k d)] dk.
// A spherical body makes the rate independent of the direction of d.
double rigid_body_rate(const MassDensity& rho, const Correlator& kernel, double d);

// Single-particle hybrid decoherence, spherically averaged:
//   Gamma(d) = 4 pi m^2 int_0^inf k^2 [gamma_C |gC~|^2 + gamma_G |gG~|^2] [1 - j0(k d)] dk
// with gamma_G the feedback correlator of gamma_C. Throws InversionError
// naming k when gamma_C is not positive there. The asymptote is the same
// integral without the [1 - j0] factor.
DecoherenceCurve hybrid_single_particle_curve(const Correlator& gamma_c, const Spectrum& gc,
                                              const Spectrum& gg, double mass,
                                              const std::vector<double>& ds,
                                              const ModelParams& params);
DecoherenceCurve hybrid_single_particle_curve(const Correlator& gamma_c, const RadialProfile& gc,
                                              const RadialProfile& gg, double mass,
                                              const std::vector<double>& ds,
                                              const ModelParams& params);

// Measurement and feedback parts of the hybrid integrand at k (without the
// 4 pi m^2 and [1 - j0] factors).
struct HybridIntegrand {
  double measurement;
  double feedback;
};
HybridIntegrand hybrid_integrand(const Correlator& gamma_c, const Correlator& gamma_g,
                                 const Spectrum& gc, const Spectrum& gg, double k);

} // namespace minheat
