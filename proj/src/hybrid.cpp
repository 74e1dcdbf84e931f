#include "minheat/hybrid.hpp"

#include "minheat/error.hpp"
#include "minheat/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace minheat {

using std::numbers::pi;

namespace {

std::string format_k(double k) {
  std::ostringstream os;
  os.precision(6);
  os << k;
  return os.str();
}

// Sign of a transform sample, using the log magnitude to tell an underflow
// (finite log) from a true zero.
int sample_sign(double value, double log_abs) {
  if (value > 0.0) return 1;
  if (value < 0.0) return -1;
  return std::isfinite(log_abs) ? 2 : 0;  // 2: underflowed, sign unknown
}

// Samples smaller than this fraction of the largest one are below the
// resolution of a numerical transform; their signs are not trusted.
constexpr double kResolvedFraction = 1e-12;

double resolution_floor(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return kResolvedFraction * m;
}

// Sign changes between resolved samples, located by linear interpolation or,
// when `f` is given, by root finding on f.
std::vector<double> zero_crossings(const std::vector<double>& k, const std::vector<double>& v,
                                   const std::vector<double>& lg,
                                   const std::function<double(double)>& f = {}) {
  const double floor = resolution_floor(v);
  std::vector<double> out;
  int last = 0;
  std::size_t last_i = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const int s = sample_sign(v[i], lg[i]);
    if (s == 0) {
      out.push_back(k[i]);
      continue;
    }
    if (s == 2) continue;
    if (std::abs(v[i]) < floor) {
      last = 0;
      continue;
    }
    if (last != 0 && s != last) {
      const double a = v[last_i];
      const double b = v[i];
      if (f) {
        std::uintmax_t iters = 100;
        const auto r = boost::math::tools::toms748_solve(
            f, k[last_i], k[i], a, b, boost::math::tools::eps_tolerance<double>(50), iters);
        out.push_back(0.5 * (r.first + r.second));
      } else {
        out.push_back(k[last_i] + (k[i] - k[last_i]) * a / (a - b));
      }
    }
    last = s;
    last_i = i;
  }
  return out;
}

// Index of the first sample below the resolution floor.
std::size_t resolved_end(const std::vector<double>& v, const std::vector<double>& lg) {
  const double floor = resolution_floor(v);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sample_sign(v[i], lg[i]) != 2 && std::abs(v[i]) < floor) return i;
  return v.size();
}

void throw_pld_undefined(const char* which, std::vector<double> zeros) {
  std::string msg = std::string("least-decoherence correlators undefined: the ") + which +
                    " transform vanishes near k =";
  for (std::size_t i = 0; i < zeros.size() && i < 8; ++i) msg += " " + format_k(zeros[i]);
  if (zeros.size() > 8) msg += " ...";
  throw PldUndefined(msg, std::move(zeros));
}

double coulomb(double G, double hbar) { return 2.0 * pi * G / hbar; }

} // namespace

Correlator Correlator::csl_delta(double gamma_csl, double m0) {
  if (!(gamma_csl > 0.0) || !(m0 > 0.0)) throw InvalidInput("CSL correlator needs gamma, m0 > 0");
  Correlator c;
  c.kind_ = Kind::CslDelta;
  c.a_ = gamma_csl;
  c.b_ = m0;
  return c;
}

Correlator Correlator::dp_coulomb(double G, double hbar) {
  if (!(G > 0.0) || !(hbar > 0.0)) throw InvalidInput("DP correlator needs G, hbar > 0");
  Correlator c;
  c.kind_ = Kind::DpCoulomb;
  c.a_ = G;
  c.b_ = hbar;
  return c;
}

Correlator Correlator::pld(Channel channel, std::shared_ptr<const Spectrum> gc,
                           std::shared_ptr<const Spectrum> gg, double G, double hbar) {
  if (!gc || !gg) throw InvalidInput("PLD correlator needs both smearing spectra");
  if (!(G > 0.0) || !(hbar > 0.0)) throw InvalidInput("PLD correlator needs G, hbar > 0");
  Correlator c;
  c.kind_ = Kind::Pld;
  c.channel_ = channel;
  c.a_ = G;
  c.b_ = hbar;
  c.gc_ = std::move(gc);
  c.gg_ = std::move(gg);
  return c;
}

Correlator Correlator::feedback(const Correlator& base, double G, double hbar) {
  if (!(G > 0.0) || !(hbar > 0.0)) throw InvalidInput("feedback correlator needs G, hbar > 0");
  Correlator c;
  c.kind_ = Kind::Feedback;
  c.a_ = G;
  c.b_ = hbar;
  c.base_ = std::make_shared<const Correlator>(base);
  return c;
}

Correlator Correlator::sampled(std::vector<double> k, std::vector<double> values) {
  if (k.size() < 2 || k.size() != values.size())
    throw InvalidInput("sampled correlator needs matching k and value columns (at least two)");
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] > 0.0) || (i > 0 && !(k[i] > k[i - 1])))
      throw InvalidInput("sampled correlator: k must be positive and strictly increasing");
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw InversionError("sampled correlator is not positive at k = " + format_k(k[i]), k[i]);
  }
  Correlator c;
  c.kind_ = Kind::Sampled;
  c.log_k_.resize(k.size());
  c.log_values_.resize(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    c.log_k_[i] = std::log(k[i]);
    c.log_values_[i] = std::log(values[i]);
  }
  c.k_ = std::move(k);
  c.values_ = std::move(values);
  return c;
}

std::string Correlator::name() const {
  switch (kind_) {
  case Kind::CslDelta:
    return "csl_delta";
  case Kind::DpCoulomb:
    return "dp_coulomb";
  case Kind::Pld:
    return channel_ == Channel::C ? "pld_c" : "pld_g";
  case Kind::Feedback:
    return "feedback(" + base_->name() + ")";
  case Kind::Sampled:
    return "sampled";
  }
  return "unknown";
}

double Correlator::value(double k) const {
  switch (kind_) {
  case Kind::CslDelta:
    return a_ / (b_ * b_);
  case Kind::DpCoulomb:
    return coulomb(a_, b_) / (k * k);
  case Kind::Pld: {
    const double ratio = channel_ == Channel::C ? gg_->log_abs(k) - gc_->log_abs(k)
                                                : gc_->log_abs(k) - gg_->log_abs(k);
    return coulomb(a_, b_) / (k * k) * std::exp(ratio);
  }
  case Kind::Feedback: {
    const double c = coulomb(a_, b_) / (k * k);
    const double base = base_->value(k);
    if (base > 0.0 && std::isfinite(base)) return c * c / base;
    return std::exp(log_value(k));
  }
  case Kind::Sampled: {
    const auto it = std::lower_bound(k_.begin(), k_.end(), k);
    if (it != k_.end() && *it == k) return values_[static_cast<std::size_t>(it - k_.begin())];
    return std::exp(log_value(k));
  }
  }
  return 0.0;
}

double Correlator::log_value(double k) const {
  switch (kind_) {
  case Kind::CslDelta:
  case Kind::DpCoulomb:
    return std::log(value(k));
  case Kind::Pld: {
    const double ratio = channel_ == Channel::C ? gg_->log_abs(k) - gc_->log_abs(k)
                                                : gc_->log_abs(k) - gg_->log_abs(k);
    return std::log(coulomb(a_, b_)) - 2.0 * std::log(k) + ratio;
  }
  case Kind::Feedback:
    return 2.0 * (std::log(coulomb(a_, b_)) - 2.0 * std::log(k)) - base_->log_value(k);
  case Kind::Sampled: {
    const double x = std::log(k);
    const std::size_t n = log_k_.size();
    std::size_t i;
    if (x <= log_k_[0]) i = 0;
    else if (x >= log_k_[n - 1]) i = n - 2;
    else i = static_cast<std::size_t>(std::upper_bound(log_k_.begin(), log_k_.end(), x) - log_k_.begin()) - 1;
    const double t = (x - log_k_[i]) / (log_k_[i + 1] - log_k_[i]);
    return log_values_[i] + t * (log_values_[i + 1] - log_values_[i]);
  }
  }
  return 0.0;
}

double Correlator::log_envelope(double k) const {
  switch (kind_) {
  case Kind::Pld: {
    const double c = log_mean_square(*gc_, k);
    const double g = log_mean_square(*gg_, k);
    if (!std::isfinite(c) || !std::isfinite(g)) return log_value(k);
    return std::log(coulomb(a_, b_)) - 2.0 * std::log(k) + 0.5 * (channel_ == Channel::C ? g - c : c - g);
  }
  case Kind::Feedback:
    return 2.0 * (std::log(coulomb(a_, b_)) - 2.0 * std::log(k)) - base_->log_envelope(k);
  default:
    return log_value(k);
  }
}

double Correlator::envelope(double k) const { return std::exp(log_envelope(k)); }

std::vector<std::pair<std::string, double>> Correlator::params() const {
  switch (kind_) {
  case Kind::CslDelta:
    return {{"gamma_csl", a_}, {"m0", b_}};
  case Kind::Sampled:
    return {{"samples", static_cast<double>(k_.size())}};
  default:
    return {{"G", a_}, {"hbar", b_}};
  }
}

Correlator gamma_g_from_gamma_c(const Correlator& gc, const ModelParams& params) {
  params.validate();
  const double c = coulomb(params.G, params.hbar);
  if (gc.kind() == Correlator::Kind::Sampled) {
    const auto& k = gc.sample_k();
    const auto& v = gc.sample_values();
    std::vector<double> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double ck = c / (k[i] * k[i]);
      out[i] = ck * ck / v[i];
    }
    return Correlator::sampled(k, std::move(out));
  }
  for (double k : default_k_grid()) {
    const double v = gc.value(k);
    if (!(v > 0.0) || !std::isfinite(v))
      throw InversionError("gamma_C is not positive at k = " + format_k(k), k);
  }
  return Correlator::feedback(gc, params.G, params.hbar);
}

std::pair<Correlator, Correlator> pld_correlators(const FourierProfile& gc, const FourierProfile& gg,
                                                  const ModelParams& params) {
  params.validate();
  if (gc.k != gg.k) throw InvalidInput("PLD correlators need both transforms on the same k grid");
  auto zc = zero_crossings(gc.k, gc.values, gc.log_abs);
  if (!zc.empty()) throw_pld_undefined("g_C", std::move(zc));
  auto zg = zero_crossings(gg.k, gg.values, gg.log_abs);
  if (!zg.empty()) throw_pld_undefined("g_G", std::move(zg));
  const double c = coulomb(params.G, params.hbar);
  // Samples past the resolution of either transform are dropped; the sampled
  // correlators extend beyond the last kept k as power laws.
  const std::size_t end =
      std::min(resolved_end(gc.values, gc.log_abs), resolved_end(gg.values, gg.log_abs));
  std::vector<double> k, vc, vg;
  for (std::size_t i = 0; i < end; ++i) {
    if (!(gc.k[i] > 0.0)) continue;  // the Coulomb factor is infinite at k = 0
    const double ck = c / (gc.k[i] * gc.k[i]);
    const double x = gg.log_abs[i] - gc.log_abs[i];
    k.push_back(gc.k[i]);
    vc.push_back(ck * std::exp(x));
    vg.push_back(ck * std::exp(-x));
  }
  return {Correlator::sampled(k, std::move(vc)), Correlator::sampled(k, std::move(vg))};
}

std::pair<Correlator, Correlator> pld_correlators(std::shared_ptr<const Spectrum> gc,
                                                  std::shared_ptr<const Spectrum> gg,
                                                  const ModelParams& params,
                                                  const std::vector<double>& k_check) {
  params.validate();
  const auto fc = fourier_radial(*gc, k_check);
  const auto fg = fourier_radial(*gg, k_check);
  auto zc = zero_crossings(fc.k, fc.values, fc.log_abs, [&](double k) { return gc->value(k); });
  if (!zc.empty()) throw_pld_undefined("g_C", std::move(zc));
  auto zg = zero_crossings(fg.k, fg.values, fg.log_abs, [&](double k) { return gg->value(k); });
  if (!zg.empty()) throw_pld_undefined("g_G", std::move(zg));
  return {Correlator::pld(Correlator::Channel::C, gc, gg, params.G, params.hbar),
          Correlator::pld(Correlator::Channel::G, gc, gg, params.G, params.hbar)};
}

namespace {

double heating_integrand(const Correlator& gamma, const Spectrum& g, double k) {
  const double v = g.value(k);
  if (v == 0.0) {
    const double lg = g.log_abs(k);
    if (!std::isfinite(lg)) return 0.0;
    return 2.0 * pi * std::pow(k, 4) * std::exp(gamma.log_value(k) + 2.0 * lg);
  }
  if (gamma.kind() == Correlator::Kind::Pld)
    return 2.0 * pi * std::pow(k, 4) * std::exp(gamma.log_value(k) + 2.0 * g.log_abs(k));
  return 2.0 * pi * std::pow(k, 4) * gamma.value(k) * v * v;
}

} // namespace

double general_heating(const Correlator& gamma, const Spectrum& g) {
  auto h = [&](double k) { return heating_integrand(gamma, g, k); };
  auto env = [&](double k) {
    return std::exp(std::log(2.0 * pi * std::pow(k, 4)) + gamma.log_envelope(k) + log_mean_square(g, k));
  };
  check_small_k(h);
  const Spectrum* list[] = {&g};
  return integrate_k(h, env, spectral_panel_width(list), spectral_k_cap(list)).value;
}

double general_heating(const Correlator& gamma, const RadialProfile& g) {
  return general_heating(gamma, *make_spectrum(g));
}

namespace {

// gamma(k) = c k^p on a spread of wavenumbers; returns c when it holds.
std::optional<double> power_law(const Correlator& gamma, int p) {
  const double ks[] = {0.01, 0.1, 0.7, 3.0, 20.0};
  double c0 = 0.0;
  for (std::size_t i = 0; i < std::size(ks); ++i) {
    const double c = gamma.value(ks[i]) / std::pow(ks[i], p);
    if (i == 0) c0 = c;
    else if (!(std::abs(c - c0) <= 1e-10 * std::abs(c0))) return std::nullopt;
  }
  return c0;
}

void scale_result(OptimizationResult& r, double factor) {
  r.value *= factor;
  r.lambda *= factor;
  r.mu *= factor;
}

// Unitary radial transform of each hat function of `el` at wavenumber k.
// On an element [a, b] the hat times r is a quadratic u; its sine moment is
// [-u cos(kr)/k + u' sin(kr)/k^2 + u'' cos(kr)/k^3] from a to b, which is
// used once k h is large enough for the cancellation to be harmless.
void hat_transforms(const LinearElements& el, double k, std::vector<double>& out) {
  const std::size_t n = el.r.size();
  out.assign(n, 0.0);
  const double pre = 4.0 * pi * std::pow(2.0 * pi, -1.5) / k;
  if (k * el.h > 1.0) {
    std::vector<double> sn(n), cs(n);
    for (std::size_t i = 0; i < n; ++i) {
      sn[i] = std::sin(k * el.r[i]);
      cs[i] = std::cos(k * el.r[i]);
    }
    const double k2 = k * k, k3 = k2 * k;
    auto moment = [&](std::size_t ia, std::size_t ib, double ua, double ub, double da, double db,
                      double dd) {
      const double at_b = -ub * cs[ib] / k + db * sn[ib] / k2 + dd * cs[ib] / k3;
      const double at_a = -ua * cs[ia] / k + da * sn[ia] / k2 + dd * cs[ia] / k3;
      return at_b - at_a;
    };
    for (std::size_t e = 0; e + 1 < n; ++e) {
      const double a = el.r[e];
      const double b = el.r[e + 1];
      const double h = b - a;
      // r (b - r) / h and r (r - a) / h.
      out[e] += pre * moment(e, e + 1, a, 0.0, (b - 2.0 * a) / h, -b / h, -2.0 / h);
      out[e + 1] += pre * moment(e, e + 1, 0.0, b, a / h, (2.0 * b - a) / h, 2.0 / h);
    }
    return;
  }
  const auto& rule = gauss_legendre(8);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double a = el.r[e];
    const double b = el.r[e + 1];
    const double h = b - a;
    double left = 0.0, right = 0.0;
    for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
      const double t = 0.5 * (1.0 + rule.nodes[m]);
      const double r = a + h * t;
      const double w = 0.5 * h * rule.weights[m] * r * std::sin(k * r);
      left += w * (1.0 - t);
      right += w * t;
    }
    out[e] += pre * left;
    out[e + 1] += pre * right;
  }
}

// Q_ij = 4 pi int_0^K k^4 gamma(k) phi~_i phi~_j dk, so that 1/2 x^T Q x is
// the heating functional of the piecewise-linear profile x. The k range stops
// once a panel adds less than 1e-13 of the trace, and at K = 16 pi / h at the
// latest, beyond the resolution of the grid.
DenseForm gram_matrix(const Correlator& gamma, const LinearElements& el) {
  const std::size_t n = el.r.size();
  // 16 Gauss points per panel resolve the 2 r_max k oscillation of phi~_i phi~_j.
  const double width = std::min(1.0, 2.0 * pi / el.r.back());
  const double K = 16.0 * pi / el.h;
  const auto& rule = gauss_legendre(16);
  std::vector<double> q(n * n, 0.0), phi;
  double trace = 0.0;
  for (double lo = 0.0; lo < K; lo += width) {
    double added = 0.0;
    for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
      const double k = lo + 0.5 * width * (1.0 + rule.nodes[m]);
      const double w = 0.5 * width * rule.weights[m] * 4.0 * pi * std::pow(k, 4) * gamma.value(k);
      hat_transforms(el, k, phi);
      for (std::size_t i = 0; i < n; ++i) {
        const double wi = w * phi[i];
        added += wi * phi[i];
        double* row = q.data() + i * n;
        for (std::size_t j = i; j < n; ++j) row[j] += wi * phi[j];
      }
    }
    trace += added;
    if (lo * el.h > 2.0 && added < 1e-13 * trace) break;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) q[i * n + j] = q[j * n + i];
  return DenseForm(n, std::move(q));
}

struct ChannelSolve {
  OptimizationResult result;
  std::string method;
};

ChannelSolve solve_channel(const Correlator& gamma, double length, const SolverOptions& base,
                           std::vector<std::string>& warnings, const char* label) {
  SolverOptions opts = base;
  opts.r_c = length;
  if (const auto c = power_law(gamma, 0)) {
    auto r = minimize(FunctionalKind::CSL, opts);
    scale_result(r, *c);
    return {std::move(r), "csl"};
  }
  if (const auto c = power_law(gamma, -2)) {
    // 2 pi int k^4 (c / k^2) |g~|^2 dk = (c / 2) int g^2 = (c / 2 pi) I_DP.
    auto r = minimize(FunctionalKind::DP, opts);
    scale_result(r, *c / (2.0 * pi));
    return {std::move(r), "dp"};
  }
  const LinearElements el(opts.n_points, opts.r_max * length);
  const auto q = gram_matrix(gamma, el);
  // Convexity spot check along random chords: (x - y)^T Q (x - y) >= 0.
  std::mt19937_64 rng(opts.seed.value_or(7));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> d(el.r.size()), qd;
  for (int trial = 0; trial < 16; ++trial) {
    for (double& v : d) v = u(rng) - u(rng);
    q.apply(d, qd);
    double curv = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      curv += d[i] * qd[i];
      scale += std::abs(d[i] * qd[i]);
    }
    if (curv < -1e-12 * scale) {
      warnings.push_back(std::string(label) +
                         " heating functional failed a convexity spot check; the result may "
                         "be a local minimum");
      break;
    }
  }
  auto r = minimize_quadratic(q, el, FunctionalKind::CSL, opts);
  return {std::move(r), "gram"};
}

} // namespace

HybridOptimum optimize_hybrid(const Correlator& gamma_c, double r_c, double r_g,
                              const ModelParams& params, const SolverOptions& opts) {
  if (!(r_c > 0.0) || !(r_g > 0.0)) throw InvalidInput("r_C and r_G must be positive");
  auto gamma_g = gamma_g_from_gamma_c(gamma_c, params);
  std::vector<std::string> warnings;
  auto c = solve_channel(gamma_c, r_c, opts, warnings, "measurement");
  auto g = solve_channel(gamma_g, r_g, opts, warnings, "feedback");
  return HybridOptimum{std::move(c.result), std::move(g.result), gamma_c, std::move(gamma_g),
                       std::move(c.method), std::move(g.method), std::move(warnings)};
}

} // namespace minheat
