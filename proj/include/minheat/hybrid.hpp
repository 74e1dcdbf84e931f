#pragma once

#include "minheat/optimizer.hpp"
#include "minheat/params.hpp"
#include "minheat/spectral.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace minheat {

// Translation-invariant noise correlator, stored by its Fourier transform
//   gamma^(k) = int gamma(x) e^(-i k.x) d^3x
// (no (2 pi)^(3/2) factor; profile transforms g~ use the unitary
// convention, so gamma^ |g~|^2 integrates against d^3k directly).
class Correlator {
public:
  enum class Kind { CslDelta, DpCoulomb, Pld, Feedback, Sampled };
  enum class Channel { C, G };

  // gamma_CSL / m0^2, constant in k.
  static Correlator csl_delta(double gamma_csl, double m0);
  // 2 pi G / (hbar k^2).
  static Correlator dp_coulomb(double G, double hbar);
  // Least-decoherence correlator of one channel:
  //   C: (2 pi G / hbar k^2) |gG~| / |gC~|,   G: (2 pi G / hbar k^2) |gC~| / |gG~|.
  static Correlator pld(Channel channel, std::shared_ptr<const Spectrum> gc,
                        std::shared_ptr<const Spectrum> gg, double G, double hbar);
  // 4 pi^2 G^2 / (hbar^2 k^4 base(k)).
  static Correlator feedback(const Correlator& base, double G, double hbar);
  // Tabulated values; log-log interpolation inside, power-law extension
  // from the end intervals outside. Values must be positive.
  static Correlator sampled(std::vector<double> k, std::vector<double> values);

  Kind kind() const { return kind_; }
  std::string name() const;
  double value(double k) const;
  double log_value(double k) const;
  // Non-oscillating stand-in for value(k) used only in integral tails (the
  // PLD ratio of transforms is replaced by the ratio of envelopes).
  double envelope(double k) const;
  double log_envelope(double k) const;

  // Parameters for reports: (name, value) pairs.
  std::vector<std::pair<std::string, double>> params() const;
  const std::vector<double>& sample_k() const { return k_; }
  const std::vector<double>& sample_values() const { return values_; }

private:
  Correlator() = default;

  Kind kind_ = Kind::CslDelta;
  Channel channel_ = Channel::C;
  double a_ = 1.0, b_ = 1.0;  // (gamma, m0) or (G, hbar)
  std::shared_ptr<const Spectrum> gc_, gg_;
  std::shared_ptr<const Correlator> base_;
  std::vector<double> k_, values_, log_k_, log_values_;
};

// Feedback correlator gamma_G = 4 pi^2 G^2 / (hbar^2 k^4 gamma_C).
// Sampled inputs are mapped sample by sample and must be positive
// (InversionError naming the first offending k otherwise).
Correlator gamma_g_from_gamma_c(const Correlator& gc, const ModelParams& params);

// Sampled least-decoherence pair on the transforms' k grid. Throws
// PldUndefined, listing the crossings, when either transform changes sign
// between samples or vanishes at one.
std::pair<Correlator, Correlator> pld_correlators(const FourierProfile& gc,
                                                  const FourierProfile& gg,
                                                  const ModelParams& params);
// Same pair as continuous functions of k; the zero check runs on `k_check`.
std::pair<Correlator, Correlator> pld_correlators(std::shared_ptr<const Spectrum> gc,
                                                  std::shared_ptr<const Spectrum> gg,
                                                  const ModelParams& params,
                                                  const std::vector<double>& k_check);

// Geometric heating functional 1/2 int int gamma(x - y) grad g(x) . grad g(y)
//   = 2 pi int_0^inf k^4 gamma^(k) |g~(k)|^2 dk.
// CslDelta gives (gamma/m0^2) dirichlet_energy, DpCoulomb (G/hbar) dp_energy.
// Throws DivergenceError when the k integral does not converge.
double general_heating(const Correlator& gamma, const Spectrum& g);
double general_heating(const Correlator& gamma, const RadialProfile& g);

struct HybridOptimum {
  OptimizationResult measurement;  // g_C under gamma_C, variance 3 r_C^2
  OptimizationResult feedback;     // g_G under gamma_G, variance 3 r_G^2
  Correlator gamma_c;
  Correlator gamma_g;
  std::string measurement_method;  // "csl", "dp" or "gram"
  std::string feedback_method;
  std::vector<std::string> warnings;  // failed convexity spot checks
};

// Minimizes the measurement and feedback heating terms separately. DP- and
// CSL-shaped correlators reduce to the corresponding single-model problems;
// other correlators use a dense Gram matrix of the piecewise-linear basis.
// Values and multipliers are those of the correlator-weighted functional.
HybridOptimum optimize_hybrid(const Correlator& gamma_c, double r_c, double r_g,
                              const ModelParams& params, const SolverOptions& opts = {});

} // namespace minheat
