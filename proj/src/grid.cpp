#include "minheat/grid.hpp"

#include "minheat/error.hpp"
#include "minheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minheat {
namespace {

constexpr int kMaxOrder = 24;

// Inverse of V_ij = x_i^j by Gauss-Jordan elimination with partial pivoting.
std::vector<double> invert_vandermonde(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> a(n * n), inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = v;
      v *= x[i];
    }
    inv[i * n + i] = 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a[c * n + j], a[piv * n + j]);
      std::swap(inv[c * n + j], inv[piv * n + j]);
    }
    const double d = a[c * n + c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c * n + j] /= d;
      inv[c * n + j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[c * n + j];
        inv[r * n + j] -= f * inv[c * n + j];
      }
    }
  }
  return inv;
}

PanelBasis build_basis(int order) {
  PanelBasis b;
  b.order = order;
  const auto& lob = gauss_lobatto(order);
  b.nodes = lob.nodes;
  b.weights = lob.weights;
  b.bary = barycentric_weights(b.nodes);
  b.diff = differentiation_matrix(b.nodes);
  const auto& gl = gauss_legendre(order + 2);
  b.gauss_nodes = gl.nodes;
  b.gauss_weights = gl.weights;
  b.gauss_interp = interpolation_matrix(b.nodes, b.gauss_nodes);
  const std::size_t m = b.gauss_nodes.size();
  const auto p = static_cast<std::size_t>(order);
  b.gauss_deriv.assign(m * p, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < p; ++l) s += b.gauss_interp[i * p + l] * b.diff[l * p + j];
      b.gauss_deriv[i * p + j] = s;
    }
  b.to_monomial = invert_vandermonde(b.nodes);
  return b;
}

} // namespace

std::vector<double> panel_monomial(const PanelBasis& basis, const double* nodal) {
  const auto p = static_cast<std::size_t>(basis.order);
  std::vector<double> c(p, 0.0);
  for (std::size_t n = 0; n < p; ++n) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += basis.to_monomial[n * p + j] * nodal[j];
    c[n] = s;
  }
  return c;
}

const PanelBasis& panel_basis(int order) {
  static const std::vector<PanelBasis> table = [] {
    std::vector<PanelBasis> t(kMaxOrder + 1);
    for (int p = 2; p <= kMaxOrder; ++p) t[p] = build_basis(p);
    return t;
  }();
  if (order < 2 || order > kMaxOrder)
    throw InvalidInput("panel order must lie in [2, " + std::to_string(kMaxOrder) + "], got " +
                       std::to_string(order));
  return table[order];
}

RadialGrid::RadialGrid(std::vector<double> breaks, int order)
    : breaks_(std::move(breaks)), order_(order), basis_(&panel_basis(order)) {
  if (breaks_.size() < 2) throw InvalidInput("radial grid needs at least one panel");
  if (breaks_.front() != 0.0) throw InvalidInput("radial grid must start at r = 0");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1]))
      throw InvalidInput("radial grid breakpoints must be strictly increasing");

  const auto& ref = basis_->nodes;
  nodes_.reserve(panel_count() * (order_ - 1) + 1);
  for (std::size_t j = 0; j < panel_count(); ++j) {
    const double a = breaks_[j];
    const double b = breaks_[j + 1];
    for (int q = (j == 0 ? 0 : 1); q < order_; ++q)
      nodes_.push_back(q == order_ - 1 ? b : (q == 0 ? a : 0.5 * (a + b) + 0.5 * (b - a) * ref[q]));
  }
}

RadialGrid RadialGrid::segmented(std::span<const double> segment_ends, std::size_t n_panels,
                                 int order) {
  if (segment_ends.empty()) throw InvalidInput("segmented grid needs at least one segment");
  const double total = segment_ends.back();
  std::vector<double> breaks{0.0};
  double lo = 0.0;
  std::size_t used = 0;
  for (std::size_t s = 0; s < segment_ends.size(); ++s) {
    const double hi = segment_ends[s];
    if (!(hi > lo)) throw InvalidInput("segment ends must be strictly increasing and positive");
    const std::size_t remaining_segments = segment_ends.size() - s - 1;
    std::size_t n = static_cast<std::size_t>(std::lround(n_panels * (hi - lo) / total));
    n = std::max<std::size_t>(n, 1);
    if (remaining_segments == 0) n = std::max<std::size_t>(1, n_panels > used ? n_panels - used : 1);
    for (std::size_t i = 1; i <= n; ++i)
      breaks.push_back(i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / n);
    used += n;
    lo = hi;
  }
  return RadialGrid(std::move(breaks), order);
}

std::size_t RadialGrid::find_panel(double r) const {
  if (r <= breaks_.front()) return 0;
  if (r >= breaks_.back()) return panel_count() - 1;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

RadialGrid RadialGrid::refined(int factor) const {
  if (factor < 1) throw InvalidInput("refinement factor must be positive");
  std::vector<double> b{0.0};
  for (std::size_t j = 0; j < panel_count(); ++j) {
    const double lo = breaks_[j];
    const double hi = breaks_[j + 1];
    for (int i = 1; i <= factor; ++i) b.push_back(i == factor ? hi : lo + (hi - lo) * i / factor);
  }
  return RadialGrid(std::move(b), order_);
}

RadialGrid RadialGrid::scaled(double s) const {
  if (!(s > 0.0)) throw InvalidInput("grid scale must be positive");
  std::vector<double> b(breaks_);
  for (double& x : b) x *= s;
  return RadialGrid(std::move(b), order_);
}

} // namespace minheat
