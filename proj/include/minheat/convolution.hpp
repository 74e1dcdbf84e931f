#pragma once

#include "minheat/profiles.hpp"

#include <vector>

namespace minheat {

// S(t) = int_0^t s f(s) ds, exact for the piecewise-polynomial interpolant.
class RadialFirstMoment {
public:
  explicit RadialFirstMoment(const RadialProfile& f);
  double operator()(double t) const;

private:
  std::vector<double> breaks_;
  std::vector<double> cumulative_;            // S at each breakpoint
  std::vector<std::vector<double>> antider_;  // per panel, coefficients in x of int_{-1}^x
  std::vector<double> mid_, half_;
};

// 3-D convolution of two radial functions evaluated at radius d,
//   (f * h)(d) = (2 pi / d) int_0^inf r f(r) [S_h(r + d) - S_h(|r - d|)] dr,
// integrated piecewise between every kink of the integrand, so polynomial
// panels are handled exactly. At d = 0 it is 4 pi int r^2 f h dr. For radial
// h this equals the autocorrelation-type overlap int f(x) h(x + d) d^3x.
double radial_convolution(const RadialProfile& f, const RadialProfile& h, double d);
double radial_convolution(const RadialProfile& f, const RadialProfile& h,
                          const RadialFirstMoment& moment_h, double d);

} // namespace minheat
