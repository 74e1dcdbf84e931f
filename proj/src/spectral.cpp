#include "minheat/spectral.hpp"

#include "minheat/error.hpp"
#include "minheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace minheat {

using std::numbers::pi;

namespace {

// (2 pi)^(-3/2) * 4 pi
const double kRadialPrefactor = 4.0 * pi * std::pow(2.0 * pi, -1.5);

// Below this k h a panel is integrated by Gauss-Legendre on subintervals;
// above it the integration-by-parts sum is used.
constexpr double kIbpThreshold = 12.0;

double horner(std::span<const double> c, double x) {
  double v = 0.0;
  for (std::size_t n = c.size(); n-- > 0;) v = v * x + c[n];
  return v;
}

// n-th derivative (in r) of the panel polynomial at x = +-1.
double endpoint_derivative(std::span<const double> c, int n, double x, double half) {
  double v = 0.0;
  for (std::size_t m = c.size(); m-- > static_cast<std::size_t>(n);) {
    double fall = 1.0;
    for (int i = 0; i < n; ++i) fall *= static_cast<double>(m - i);
    const bool odd = ((m - n) & 1u) != 0;
    v += c[m] * fall * (odd && x < 0.0 ? -1.0 : 1.0);
  }
  return v / std::pow(half, n);
}

// Imaginary part of sum_n (-1)^n [u^(n) e^{ikr}]_a^b / (ik)^(n+1).
double ibp_sine(std::span<const double> du_a, std::span<const double> du_b, double a, double b,
                double k) {
  const std::complex<double> ea = std::polar(1.0, k * a);
  const std::complex<double> eb = std::polar(1.0, k * b);
  const std::complex<double> step(0.0, 1.0 / k);  // -1 / (ik)
  std::complex<double> factor(0.0, -1.0 / k);     // 1 / (ik)
  std::complex<double> sum = 0.0;
  for (std::size_t n = 0; n < du_a.size(); ++n) {
    sum += factor * (du_b[n] * eb - du_a[n] * ea);
    factor *= step;
  }
  return sum.imag();
}

double gauss_sine(double a, double b, std::span<const double> u, double k) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const auto& rule = gauss_legendre(static_cast<int>(u.size()) + 8);
  const int pieces = std::max(1, static_cast<int>(std::ceil(k * (b - a) / 3.0)));
  double total = 0.0;
  for (int s = 0; s < pieces; ++s) {
    const double x0 = -1.0 + 2.0 * s / pieces;
    const double x1 = -1.0 + 2.0 * (s + 1) / pieces;
    const double hm = 0.5 * (x1 - x0);
    const double xm = 0.5 * (x1 + x0);
    double part = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = xm + hm * rule.nodes[q];
      part += rule.weights[q] * horner(u, x) * std::sin(k * (mid + half * x));
    }
    total += hm * part;
  }
  return half * total;
}

} // namespace

double Spectrum::log_abs(double k) const { return std::log(std::abs(value(k))); }

GaussianSpectrum::GaussianSpectrum(double r_c, double norm) : r_c_(r_c), norm_(norm) {
  if (!(r_c > 0.0)) throw InvalidInput("Gaussian spectrum: r_c must be positive");
}

double GaussianSpectrum::value(double k) const {
  return norm_ * std::pow(2.0 * pi, -1.5) * std::exp(-0.5 * k * k * r_c_ * r_c_);
}

double GaussianSpectrum::log_abs(double k) const {
  return std::log(norm_) - 1.5 * std::log(2.0 * pi) - 0.5 * k * k * r_c_ * r_c_;
}

double GaussianSpectrum::mean_square(double k) const {
  const double v = value(k);
  return v * v;
}

double sine_moment(double a, double b, std::span<const double> u, double k) {
  if (k == 0.0) return 0.0;
  if (k * (b - a) <= kIbpThreshold) return gauss_sine(a, b, u, k);
  const double half = 0.5 * (b - a);
  std::vector<double> da(u.size()), db(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    da[n] = endpoint_derivative(u, static_cast<int>(n), -1.0, half);
    db[n] = endpoint_derivative(u, static_cast<int>(n), 1.0, half);
  }
  return ibp_sine(da, db, a, b, k);
}

RadialSpectrum::RadialSpectrum(const RadialProfile& f) {
  const auto& grid = f.grid();
  const auto& basis = grid.basis();
  const std::size_t panels = grid.panel_count();
  breaks_.assign(grid.breaks().begin(), grid.breaks().end());
  u_.resize(panels);
  const auto vals = f.values();
  extent_ = 0.0;
  for (std::size_t j = 0; j < panels; ++j) {
    const double mid = 0.5 * (grid.panel_lo(j) + grid.panel_hi(j));
    const double half = 0.5 * (grid.panel_hi(j) - grid.panel_lo(j));
    const auto c = panel_monomial(basis, vals.data() + grid.first_node(j));
    std::vector<double> u(c.size() + 1, 0.0);
    for (std::size_t n = 0; n < c.size(); ++n) {
      u[n] += mid * c[n];
      u[n + 1] += half * c[n];
    }
    bool nonzero = false;
    for (std::size_t i = 0; i < static_cast<std::size_t>(basis.order); ++i)
      nonzero = nonzero || vals[grid.first_node(j) + i] != 0.0;
    if (nonzero) extent_ = grid.panel_hi(j);
    std::vector<double> lo(u.size()), hi(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
      lo[n] = endpoint_derivative(u, static_cast<int>(n), -1.0, half);
      hi[n] = endpoint_derivative(u, static_cast<int>(n), 1.0, half);
    }
    du_lo_.push_back(std::move(lo));
    du_hi_.push_back(std::move(hi));
    u_[j] = std::move(u);
  }
  if (extent_ == 0.0) extent_ = grid.r_max();

  const int degree = basis.order;  // u has degree order
  jumps_.assign(breaks_.size(), std::vector<double>(degree + 1, 0.0));
  for (std::size_t b = 0; b < breaks_.size(); ++b) {
    for (int n = 0; n <= degree; ++n) {
      const double right = b < panels ? du_lo_[b][n] : 0.0;
      const double left = b > 0 ? du_hi_[b - 1][n] : 0.0;
      jumps_[b][n] = right - left;
    }
  }

  zero_moment_ = f.integrate([](double r, double g, double) { return r * r * g; });
  const auto m = check_constraints(f);
  length_ = m.variance > 0.0 ? std::sqrt(m.variance / 3.0) : 1.0;
}

double RadialSpectrum::value(double k) const {
  k = std::abs(k);
  if (k == 0.0) return kRadialPrefactor * zero_moment_;
  double total = 0.0;
  for (std::size_t j = 0; j < u_.size(); ++j) {
    if (breaks_[j] >= extent_) break;
    const double a = breaks_[j];
    const double b = breaks_[j + 1];
    total += k * (b - a) <= kIbpThreshold ? gauss_sine(a, b, u_[j], k)
                                          : ibp_sine(du_lo_[j], du_hi_[j], a, b, k);
  }
  return kRadialPrefactor * total / k;
}

double RadialSpectrum::mean_square(double k) const {
  k = std::abs(k);
  if (k == 0.0) return value(0.0) * value(0.0);
  const std::complex<double> ik(0.0, k);
  double ms = 0.0;
  for (std::size_t b = 0; b < jumps_.size(); ++b) {
    std::complex<double> factor = 1.0 / ik;
    std::complex<double> a = 0.0;
    for (double jn : jumps_[b]) {
      a += jn * factor;
      factor *= -1.0 / ik;
    }
    if (b == 0) ms += a.imag() * a.imag();
    else ms += 0.5 * std::norm(a);
  }
  const double pre = kRadialPrefactor / k;
  return pre * pre * ms;
}

std::shared_ptr<const Spectrum> make_spectrum(const RadialProfile& f) {
  return std::make_shared<RadialSpectrum>(f);
}

std::shared_ptr<const Spectrum> make_spectrum(const ClosedFormProfile& f) {
  if (f.kind == ProfileKind::Gaussian) return std::make_shared<GaussianSpectrum>(f.r_c);
  return std::make_shared<RadialSpectrum>(make_closed_form(f));
}

std::vector<double> log_k_grid(double k_min, double k_max, std::size_t n) {
  if (!(k_min > 0.0) || !(k_max > k_min) || n < 2)
    throw InvalidInput("k grid needs 0 < k_min < k_max and at least two points");
  std::vector<double> k(n);
  const double a = std::log(k_min);
  const double b = std::log(k_max);
  for (std::size_t i = 0; i < n; ++i)
    k[i] = i + 1 == n ? k_max : std::exp(a + (b - a) * static_cast<double>(i) / (n - 1));
  k[0] = k_min;
  return k;
}

std::vector<double> default_k_grid() { return log_k_grid(1e-3, 50.0, 512); }

FourierProfile fourier_radial(const Spectrum& s, std::span<const double> k) {
  FourierProfile out;
  out.k.assign(k.begin(), k.end());
  out.values.resize(k.size());
  out.log_abs.resize(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < 0.0) throw InvalidInput("wavenumbers must be non-negative");
    out.values[i] = s.value(k[i]);
    out.log_abs[i] = s.log_abs(k[i]);
  }
  return out;
}

FourierProfile fourier_radial(const RadialProfile& f, std::span<const double> k) {
  return fourier_radial(RadialSpectrum(f), k);
}

FourierProfile fourier_radial(const RadialProfile& f) {
  const auto k = default_k_grid();
  return fourier_radial(f, k);
}

namespace {

double envelope_tail(const std::function<double(double)>& envelope, double K) {
  // t = K / k maps [K, inf) onto (0, 1].
  const auto& rule = gauss_legendre(24);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = 0.5 * (1.0 + rule.nodes[q]);
    s += rule.weights[q] * envelope(K / t) * K / (t * t);
  }
  return 0.5 * s;
}

} // namespace

SpectralIntegral integrate_k(const std::function<double(double)>& h,
                             const std::function<double(double)>& envelope, double panel_width,
                             double k_cap, double rel_tol) {
  if (!(panel_width > 0.0) || !(k_cap > panel_width))
    throw InvalidInput("integrate_k: bad panel width or cutoff");
  const auto& rule = gauss_legendre(16);
  constexpr int kChunk = 8;
  const double k_min = 8.0 * panel_width;
  SpectralIntegral out;
  double K = 0.0;
  double tail = 0.0;
  for (;;) {
    for (int c = 0; c < kChunk; ++c) {
      const double lo = K;
      const double hi = K + panel_width;
      double s = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double k = 0.5 * (lo + hi) + 0.5 * panel_width * rule.nodes[q];
        s += rule.weights[q] * h(k);
      }
      out.value += 0.5 * panel_width * s;
      K = hi;
    }
    if (!std::isfinite(out.value)) throw DivergenceError("k-space integral is not finite");
    tail = envelope_tail(envelope, K);
    if (K >= k_min && (tail == 0.0 || std::abs(tail) <= rel_tol * std::abs(out.value))) break;
    if (K >= k_cap) {
      const double e1 = envelope(K);
      const double e4 = envelope(4.0 * K);
      if (e1 > 0.0) {
        const double decay = std::log(e1 / std::max(e4, 1e-300)) / std::log(4.0);
        if (decay <= 1.05)
          throw DivergenceError("k-space integrand decays like k^-" + std::to_string(decay) +
                                " at k = " + std::to_string(K) + "; the integral diverges");
      }
      break;
    }
  }
  if (!std::isfinite(tail)) throw DivergenceError("k-space tail is not finite");
  out.tail = tail;
  out.value += tail;
  out.k_end = K;
  return out;
}

void check_small_k(const std::function<double(double)>& h) {
  const double a = h(1e-9);
  const double b = h(1e-8);
  if (!std::isfinite(a) || !std::isfinite(b))
    throw DivergenceError("k-space integrand is not finite near k = 0");
  if (a > 0.0 && b > 0.0 && std::log10(b / a) <= -0.95)
    throw DivergenceError("k-space integrand grows like k^" + std::to_string(std::log10(b / a)) +
                          " near k = 0; the integral diverges");
}

double log_mean_square(const Spectrum& s, double k) {
  const double m = s.mean_square(k);
  if (m > 0.0) return std::log(m);
  return 2.0 * s.log_abs(k);
}

double spectral_panel_width(std::span<const Spectrum* const> spectra) {
  double w = 0.5;
  for (const auto* s : spectra) {
    w = std::min(w, 0.5 / s->length_scale());
    w = std::min(w, pi / (2.0 * s->extent()));
  }
  return w;
}

double spectral_k_cap(std::span<const Spectrum* const> spectra) {
  double sigma = 1e300;
  for (const auto* s : spectra) sigma = std::min(sigma, s->length_scale());
  return 2000.0 / sigma;
}

} // namespace minheat
