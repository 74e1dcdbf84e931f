#include "minheat/decoherence.hpp"

#include "minheat/convolution.hpp"
#include "minheat/error.hpp"
#include "minheat/functionals.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace minheat {

using std::numbers::pi;

namespace {

// 1 - sin(x)/x without cancellation at small x.
double one_minus_j0(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return x2 / 6.0 - x2 * x2 / 120.0;
  }
  return 1.0 - std::sin(x) / x;
}

void check_distances(const std::vector<double>& ds) {
  for (double d : ds)
    if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidInput("distances must be finite and >= 0");
}

// gamma |g~|^2 without underflow where g~ is tiny.
double weighted_square(const Correlator& gamma, const Spectrum& g, double k) {
  const double v = g.value(k);
  const double lg = g.log_abs(k);
  if (!std::isfinite(lg)) return 0.0;
  const double gv = gamma.value(k);
  if (v != 0.0 && std::isfinite(gv) && gv > 0.0) {
    const double out = gv * v * v;
    if (out > 0.0) return out;
  }
  return std::exp(gamma.log_value(k) + 2.0 * lg);
}

std::string format_k(double k) {
  std::ostringstream os;
  os.precision(6);
  os << k;
  return os.str();
}

// 1 - A(d)/A(0) for the autocorrelation A of f.
std::vector<double> normalized_deficit(const RadialProfile& f, const std::vector<double>& ds) {
  const RadialFirstMoment moment(f);
  const double a0 = radial_convolution(f, f, moment, 0.0);
  std::vector<double> out;
  out.reserve(ds.size());
  for (double d : ds) out.push_back(d == 0.0 ? 0.0 : 1.0 - radial_convolution(f, f, moment, d) / a0);
  return out;
}

} // namespace

double overlap_k(const RadialProfile& g) {
  return 4.0 * pi * g.integrate([](double r, double v, double) { return r * r * v * v; });
}

double pair_overlap(const RadialProfile& f, double d) {
  if (!(d >= 0.0)) throw InvalidInput("pair_overlap: d must be >= 0");
  return radial_convolution(f, f, d);
}

DecoherenceCurve grw_curve(const RadialProfile& g, const std::vector<double>& ds) {
  check_distances(ds);
  DecoherenceCurve c;
  c.model = "grw";
  c.rate_constant = "lambda_GRW m/m0";
  c.d = ds;
  // The autocorrelation of sqrt(g) is 1 at d = 0 for unit-norm g; dividing
  // by its computed value keeps Gamma(0) = 0 to rounding.
  c.rates = normalized_deficit(sqrt_profile(g), ds);
  c.asymptote = 1.0;
  return c;
}

DecoherenceCurve csl_curve(const RadialProfile& g, const std::vector<double>& ds) {
  check_distances(ds);
  DecoherenceCurve c;
  c.model = "csl";
  c.rate_constant = "gamma_CSL K (m/m0)^2";
  c.d = ds;
  c.rates = normalized_deficit(g, ds);
  c.asymptote = 1.0;
  c.overlap_k = overlap_k(g);
  return c;
}

double closed_form_F(FunctionalKind model, double s) {
  if (!(s >= 0.0)) throw InvalidInput("closed_form_F: s must be >= 0");
  if (s >= 2.0) return 0.0;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s2 * s2;
  const double s5 = s4 * s;
  const double s7 = s5 * s2;
  switch (model) {
  case FunctionalKind::GRW:
    return 1.0 - 7.0 / 4.0 * s2 + 35.0 / 32.0 * s3 - 7.0 / 64.0 * s5 + 3.0 / 512.0 * s7;
  case FunctionalKind::CSL: {
    const double s9 = s7 * s2;
    const double s11 = s9 * s2;
    return 1.0 - 11.0 / 6.0 * s2 + 33.0 / 16.0 * s4 - 77.0 / 64.0 * s5 + 33.0 / 256.0 * s7 -
           11.0 / 1024.0 * s9 + 5.0 / 12288.0 * s11;
  }
  case FunctionalKind::DP:
    break;
  }
  throw UnsupportedKind("closed_form_F is defined for GRW and CSL only");
}

double rigid_body_rate_csl(const MassDensity& rho, double d, double gamma_csl, double m0) {
  if (!(d >= 0.0)) throw InvalidInput("rigid_body_rate: d must be >= 0");
  if (!(gamma_csl > 0.0) || !(m0 > 0.0)) throw InvalidInput("gamma_CSL and m0 must be positive");
  if (d == 0.0) return 0.0;
  const auto& f = rho.profile();
  const RadialFirstMoment moment(f);
  const double a0 = radial_convolution(f, f, moment, 0.0);
  return gamma_csl / (m0 * m0) * (a0 - radial_convolution(f, f, moment, d));
}

double rigid_body_rate(const MassDensity& rho, const Correlator& kernel, double d) {
  if (!(d >= 0.0)) throw InvalidInput("rigid_body_rate: d must be >= 0");
  if (d == 0.0) return 0.0;
  const auto spec = make_spectrum(rho.profile());
  auto h = [&](double k) {
    return 4.0 * pi * k * k * weighted_square(kernel, *spec, k) * one_minus_j0(k * d);
  };
  auto env = [&](double k) {
    return 4.0 * pi * k * k * std::exp(kernel.log_envelope(k) + log_mean_square(*spec, k));
  };
  check_small_k(h);
  const Spectrum* list[] = {spec.get()};
  const double width = std::min(spectral_panel_width(list), pi / (2.0 * d));
  return integrate_k(h, env, width, spectral_k_cap(list)).value;
}

HybridIntegrand hybrid_integrand(const Correlator& gamma_c, const Correlator& gamma_g,
                                 const Spectrum& gc, const Spectrum& gg, double k) {
  const double c = gamma_c.log_value(k);
  if (!std::isfinite(c))
    throw InversionError("gamma_C is not positive at k = " + format_k(k), k);
  return {k * k * weighted_square(gamma_c, gc, k), k * k * weighted_square(gamma_g, gg, k)};
}

DecoherenceCurve hybrid_single_particle_curve(const Correlator& gamma_c, const Spectrum& gc,
                                              const Spectrum& gg, double mass,
                                              const std::vector<double>& ds,
                                              const ModelParams& params) {
  check_distances(ds);
  if (!(mass > 0.0)) throw InvalidInput("particle mass must be positive");
  const auto gamma_g = gamma_g_from_gamma_c(gamma_c, params);
  const double pre = 4.0 * pi * mass * mass;
  auto base = [&](double k) {
    const auto t = hybrid_integrand(gamma_c, gamma_g, gc, gg, k);
    return pre * (t.measurement + t.feedback);
  };
  auto env = [&](double k) {
    return pre * k * k *
           (std::exp(gamma_c.log_envelope(k) + log_mean_square(gc, k)) +
            std::exp(gamma_g.log_envelope(k) + log_mean_square(gg, k)));
  };
  const Spectrum* list[] = {&gc, &gg};
  const double width = spectral_panel_width(list);
  const double cap = spectral_k_cap(list);

  DecoherenceCurve c;
  c.model = "hybrid";
  c.rate_constant = "1";
  c.d = ds;
  for (double d : ds) {
    if (d == 0.0) {
      c.rates.push_back(0.0);
      continue;
    }
    auto h = [&](double k) { return base(k) * one_minus_j0(k * d); };
    check_small_k(h);
    c.rates.push_back(integrate_k(h, env, std::min(width, pi / (2.0 * d)), cap).value);
  }
  try {
    check_small_k(base);
    c.asymptote = integrate_k(base, env, width, cap).value;
  } catch (const DivergenceError&) {
    c.asymptote = std::numeric_limits<double>::infinity();
  }
  return c;
}

DecoherenceCurve hybrid_single_particle_curve(const Correlator& gamma_c, const RadialProfile& gc,
                                              const RadialProfile& gg, double mass,
                                              const std::vector<double>& ds,
                                              const ModelParams& params) {
  return hybrid_single_particle_curve(gamma_c, *make_spectrum(gc), *make_spectrum(gg), mass, ds,
                                      params);
}

} // namespace minheat
