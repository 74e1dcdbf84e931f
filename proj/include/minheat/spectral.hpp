#pragma once

#include "minheat/profiles.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace minheat {

// Radial Fourier transform with the unitary convention
//   g~(k) = (2 pi)^(-3/2) int g(x) e^(-i k.x) d^3x
//         = (2 pi)^(-3/2) (4 pi / k) int_0^inf r g(r) sin(k r) dr.
class Spectrum {
public:
  virtual ~Spectrum() = default;

  virtual double value(double k) const = 0;
  virtual double log_abs(double k) const;
  // Non-oscillating stand-in for value(k)^2 at large k (cross terms between
  // distinct radii averaged out). Used only for integral tails.
  virtual double mean_square(double k) const = 0;
  // Radius beyond which the profile vanishes.
  virtual double extent() const = 0;
  // Standard deviation per axis of the profile, sqrt(variance / 3).
  virtual double length_scale() const = 0;
};

class GaussianSpectrum final : public Spectrum {
public:
  explicit GaussianSpectrum(double r_c, double norm = 1.0);
  double value(double k) const override;
  double log_abs(double k) const override;
  double mean_square(double k) const override;
  double extent() const override { return kDefaultTailLength * r_c_; }
  double length_scale() const override { return r_c_; }

private:
  double r_c_;
  double norm_;
};

// Exact transform of the piecewise-polynomial interpolant of a RadialProfile.
class RadialSpectrum final : public Spectrum {
public:
  explicit RadialSpectrum(const RadialProfile& f);
  double value(double k) const override;
  double mean_square(double k) const override;
  double extent() const override { return extent_; }
  double length_scale() const override { return length_; }

private:
  std::vector<double> breaks_;
  std::vector<std::vector<double>> u_;      // per panel: r f(r) as coefficients in x on [-1, 1]
  std::vector<std::vector<double>> du_lo_, du_hi_;  // per panel: u^(n) at both ends
  std::vector<std::vector<double>> jumps_;  // per break: jump of u^(n), n = 0..degree
  double zero_moment_ = 0.0;                // int r^2 f dr
  double extent_ = 0.0;
  double length_ = 1.0;
};

// log mean_square(k), falling back to 2 log_abs(k) where the square underflows.
double log_mean_square(const Spectrum& s, double k);

std::shared_ptr<const Spectrum> make_spectrum(const RadialProfile& f);
std::shared_ptr<const Spectrum> make_spectrum(const ClosedFormProfile& f);

// int_a^b u(r) sin(k r) dr for a polynomial u given by coefficients in the
// panel coordinate x = (2r - a - b) / (b - a).
double sine_moment(double a, double b, std::span<const double> u, double k);

struct FourierProfile {
  std::vector<double> k;
  std::vector<double> values;
  std::vector<double> log_abs;  // log |g~|, finite even where values underflow
};

// Logarithmic k grid on [1e-3, 50] with 512 points.
std::vector<double> default_k_grid();
std::vector<double> log_k_grid(double k_min, double k_max, std::size_t n);

FourierProfile fourier_radial(const Spectrum& s, std::span<const double> k);
FourierProfile fourier_radial(const RadialProfile& f);
FourierProfile fourier_radial(const RadialProfile& f, std::span<const double> k);

struct SpectralIntegral {
  double value = 0.0;
  double tail = 0.0;   // part of value contributed beyond k_end
  double k_end = 0.0;
};

// int_0^inf h(k) dk on Gauss-Legendre panels of the given width. Panels are
// added until the tail estimated from `envelope` (a smooth majorant-like
// stand-in for h at large k) falls below rel_tol of the running total, or
// k_cap is reached; the envelope tail is then added. Throws DivergenceError
// when the envelope decays no faster than 1/k at the final cutoff.
SpectralIntegral integrate_k(const std::function<double(double)>& h,
                             const std::function<double(double)>& envelope, double panel_width,
                             double k_cap, double rel_tol = 1e-11);

// Throws DivergenceError when h grows like 1/k or faster as k -> 0, or is
// not finite there.
void check_small_k(const std::function<double(double)>& h);

// Panel width and cutoff suited to integrands built from these spectra.
double spectral_panel_width(std::span<const Spectrum* const> spectra);
double spectral_k_cap(std::span<const Spectrum* const> spectra);

} // namespace minheat
