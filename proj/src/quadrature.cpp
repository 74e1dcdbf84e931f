#include "minheat/quadrature.hpp"

#include "minheat/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace minheat {
namespace {

constexpr int kMaxGauss = 96;
constexpr int kMaxLobatto = 32;

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

QuadratureRule build_gauss(int m) {
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(m, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(m, x, p, dp);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Interior nodes are the roots of P'_{p-1}; Newton on (1-x^2) P'_{p-1}.
QuadratureRule build_lobatto(int p) {
  const int n = p - 1;
  QuadratureRule rule;
  rule.nodes.resize(p);
  rule.weights.resize(p);
  for (int i = 0; i < p; ++i) {
    double x = -std::cos(std::numbers::pi * i / n);
    if (i != 0 && i != n) {
      for (int it = 0; it < 100; ++it) {
        // P'_{n} and P''_{n} from the Legendre ODE.
        double pn = 0.0, dpn = 0.0;
        legendre(n, x, pn, dpn);
        const double d2 = (2.0 * x * dpn - n * (n + 1.0) * pn) / (1.0 - x * x);
        const double dx = dpn / d2;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
    }
    double pn = 0.0, dpn = 0.0;
    if (i == 0 || i == n) {
      pn = (i == 0 && n % 2 == 1) ? -1.0 : 1.0;
    } else {
      legendre(n, x, pn, dpn);
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / (n * (n + 1.0) * pn * pn);
  }
  return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(int m) {
  static const std::vector<QuadratureRule> table = [] {
    std::vector<QuadratureRule> t(kMaxGauss + 1);
    for (int i = 1; i <= kMaxGauss; ++i) t[i] = build_gauss(i);
    return t;
  }();
  if (m < 1 || m > kMaxGauss)
    throw InvalidInput("gauss_legendre: unsupported point count " + std::to_string(m));
  return table[m];
}

const QuadratureRule& gauss_lobatto(int p) {
  static const std::vector<QuadratureRule> table = [] {
    std::vector<QuadratureRule> t(kMaxLobatto + 1);
    for (int i = 2; i <= kMaxLobatto; ++i) t[i] = build_lobatto(i);
    return t;
  }();
  if (p < 2 || p > kMaxLobatto)
    throw InvalidInput("gauss_lobatto: unsupported order " + std::to_string(p));
  return table[p];
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
  return w;
}

std::vector<double> differentiation_matrix(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  const auto w = barycentric_weights(nodes);
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
      d[i * n + j] = v;
      diag -= v;
    }
    d[i * n + i] = diag;
  }
  return d;
}

double barycentric_eval(std::span<const double> nodes, std::span<const double> bary,
                        std::span<const double> values, double x) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double dx = x - nodes[j];
    if (dx == 0.0) return values[j];
    const double t = bary[j] / dx;
    num += t * values[j];
    den += t;
  }
  return num / den;
}

std::vector<double> interpolation_matrix(std::span<const double> nodes,
                                         std::span<const double> targets) {
  const std::size_t n = nodes.size();
  const auto bary = barycentric_weights(nodes);
  std::vector<double> m(targets.size() * n, 0.0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double x = targets[i];
    std::size_t hit = n;
    for (std::size_t j = 0; j < n; ++j)
      if (x == nodes[j]) hit = j;
    if (hit < n) {
      m[i * n + hit] = 1.0;
      continue;
    }
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = bary[j] / (x - nodes[j]);
      m[i * n + j] = t;
      den += t;
    }
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] /= den;
  }
  return m;
}

} // namespace minheat
