#include "minheat/optimizer.hpp"

#include "minheat/error.hpp"
#include "minheat/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace minheat {

using std::numbers::pi;

TridiagonalForm::TridiagonalForm(std::vector<double> diag, std::vector<double> off)
    : diag_(std::move(diag)), off_(std::move(off)) {
  if (diag_.empty() || off_.size() + 1 != diag_.size())
    throw InvalidInput("tridiagonal form: inconsistent sizes");
}

void TridiagonalForm::apply(const std::vector<double>& x, std::vector<double>& y) const {
  const std::size_t n = diag_.size();
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag_[i] * x[i];
    if (i > 0) v += off_[i - 1] * x[i - 1];
    if (i + 1 < n) v += off_[i] * x[i + 1];
    y[i] = v;
  }
}

DenseForm::DenseForm(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
  if (a_.size() != n * n) throw InvalidInput("dense form: expected n*n entries");
}

void DenseForm::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = a_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

LinearElements::LinearElements(std::size_t n, double r_max) {
  if (n < 2) throw InvalidInput("need at least two nodes");
  if (!(r_max > 0.0)) throw InvalidInput("r_max must be positive");
  h = r_max / static_cast<double>(n - 1);
  r.resize(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i + 1 == n ? r_max : h * static_cast<double>(i);
  norm_weights.assign(n, 0.0);
  variance_weights.assign(n, 0.0);
  const auto& rule = gauss_legendre(4);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = 0.5 * (1.0 + rule.nodes[q]);
      const double x = r[e] + t * h;
      const double w = 0.5 * rule.weights[q] * h * 4.0 * pi;
      norm_weights[e] += w * x * x * (1.0 - t);
      norm_weights[e + 1] += w * x * x * t;
      variance_weights[e] += w * x * x * x * x * (1.0 - t);
      variance_weights[e + 1] += w * x * x * x * x * t;
    }
  }
}

TridiagonalForm LinearElements::stiffness() const {
  const std::size_t n = r.size();
  std::vector<double> d(n, 0.0), o(n - 1, 0.0);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double m = 4.0 * pi * (std::pow(r[e + 1], 3) - std::pow(r[e], 3)) / 3.0 / (h * h);
    d[e] += m;
    d[e + 1] += m;
    o[e] -= m;
  }
  return TridiagonalForm(std::move(d), std::move(o));
}

TridiagonalForm LinearElements::mass(int power) const {
  const std::size_t n = r.size();
  std::vector<double> d(n, 0.0), o(n - 1, 0.0);
  const auto& rule = gauss_legendre(4);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = 0.5 * (1.0 + rule.nodes[q]);
      const double x = r[e] + t * h;
      const double w = 0.5 * rule.weights[q] * h * 4.0 * pi * std::pow(x, power);
      d[e] += w * (1.0 - t) * (1.0 - t);
      d[e + 1] += w * t * t;
      o[e] += w * t * (1.0 - t);
    }
  }
  return TridiagonalForm(std::move(d), std::move(o));
}

RadialGrid LinearElements::grid() const { return RadialGrid(r, 2); }

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Increasing-to-decreasing sign change of a monotonically decreasing f,
// bracketed by stepping out from x0.
template <class F>
double decreasing_root(F f, double x0, double step) {
  double lo = x0, hi = x0;
  double flo = f(lo), fhi = flo;
  if (flo == 0.0) return x0;
  if (flo > 0.0) {
    for (int k = 0; k < 200 && fhi > 0.0; ++k) {
      lo = hi;
      flo = fhi;
      hi += step;
      step *= 2.0;
      fhi = f(hi);
    }
  } else {
    for (int k = 0; k < 200 && flo < 0.0; ++k) {
      hi = lo;
      fhi = flo;
      lo -= step;
      step *= 2.0;
      flo = f(lo);
    }
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo > 0.0 && fhi < 0.0)) return 0.5 * (lo + hi);
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

// W-metric projection onto {x >= 0, a.x = t1, b.x = t2}. With multipliers
// nu the projection is max(0, z - (nu1 a + nu2 b) / w); the dual is concave,
// so nu1 solves a monotone equation for each nu2 and nu2 a monotone outer one.
class Projector {
public:
  Projector(const Vec& w, const Vec& a, const Vec& b, double t1, double t2)
      : w_(w), a_(a), b_(b), t1_(t1), t2_(t2) {}

  double nu1 = 0.0, nu2 = 0.0;  // warm-started between calls

  void operator()(const Vec& z, Vec& x) {
    const std::size_t n = z.size();
    x.resize(n);
    double zmax = 0.0;
    for (double v : z) zmax = std::max(zmax, std::abs(v));
    zmax = std::max(zmax, 1e-300);
    auto fill = [&](double m1, double m2) {
      for (std::size_t i = 0; i < n; ++i)
        x[i] = std::max(0.0, z[i] - (m1 * a_[i] + m2 * b_[i]) / w_[i]);
    };
    double bmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) bmax = std::max(bmax, b_[i] / w_[i]);
    auto inner = [&](double m2) {
      nu1 = decreasing_root(
          [&](double m1) {
            fill(m1, m2);
            return dot(a_, x) - t1_;
          },
          nu1, 1e-3 * zmax);
      fill(nu1, m2);
    };
    nu2 = decreasing_root(
        [&](double m2) {
          inner(m2);
          return dot(b_, x) - t2_;
        },
        nu2, 1e-3 * zmax / bmax);
    inner(nu2);
  }

private:
  const Vec& w_;
  const Vec& a_;
  const Vec& b_;
  double t1_, t2_;
};

double w_norm(const Vec& v, const Vec& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
  return std::sqrt(s);
}

// Largest eigenvalue of W^-1 Q by power iteration.
double largest_eigenvalue(const QuadraticForm& q, const Vec& w) {
  const std::size_t n = w.size();
  Vec v(n), qv;
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i));
  double nv = w_norm(v, w);
  for (double& x : v) x /= nv;
  double est = 0.0;
  for (int it = 0; it < 200; ++it) {
    q.apply(v, qv);
    for (std::size_t i = 0; i < n; ++i) qv[i] /= w[i];
    const double prev = est;
    est = w_norm(qv, w);
    if (!(est > 0.0)) return 1.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = qv[i] / est;
    if (it > 10 && std::abs(est - prev) <= 1e-3 * est) break;
  }
  return est;
}


void fill_support(OptimizationResult& out, const Vec& x, FunctionalKind kind) {
  if (kind == FunctionalKind::GRW) return;
  const double peak = *std::max_element(x.begin(), x.end());
  if (x.back() <= 1e-12 * peak)
    out.support_estimate = estimate_support_edge(out.profile, kind == FunctionalKind::CSL ? 2 : 1);
}

// In-place Cholesky factor of the leading m x m block of `a` (row-major,
// stride m). Returns false when the block is not positive definite.
bool cholesky(Vec& a, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j * m + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * m + k] * a[j * m + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * m + j] = d;
    for (std::size_t i = j + 1; i < m; ++i) {
      double v = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * m + k] * a[j * m + k];
      a[i * m + j] = v / d;
    }
  }
  return true;
}

void cholesky_solve(const Vec& l, std::size_t m, Vec& x) {
  for (std::size_t i = 0; i < m; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= l[i * m + k] * x[k];
    x[i] = v / l[i * m + i];
  }
  for (std::size_t i = m; i-- > 0;) {
    double v = x[i];
    for (std::size_t k = i + 1; k < m; ++k) v -= l[k * m + i] * x[k];
    x[i] = v / l[i * m + i];
  }
}

// Primal-dual active set steps for a dense form, started from the support of
// x: solve the equality-constrained problem on the support, then move nodes
// with negative values out and nodes with negative reduced gradient in.
// On success x holds the exact discrete minimizer and lam, mu its multipliers.
bool active_set_polish(const DenseForm& q, const Vec& a, const Vec& b, double t1, double t2,
                       Vec& x, double& lam, double& mu) {
  const std::size_t n = x.size();
  const double peak = *std::max_element(x.begin(), x.end());
  std::vector<char> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = x[i] > 1e-9 * peak;
  Vec trial(n), qx;
  for (int step = 0; step < 12; ++step) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (in[i]) s.push_back(i);
    const std::size_t m = s.size();
    if (m < 2) return false;
    Vec l(m * m), u(m), v(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) l[i * m + j] = q(s[i], s[j]);
      u[i] = a[s[i]];
      v[i] = b[s[i]];
    }
    if (!cholesky(l, m)) return false;
    cholesky_solve(l, m, u);
    cholesky_solve(l, m, v);
    // x_S = -lam u - mu v with a.x = t1, b.x = t2.
    double au = 0.0, av = 0.0, bu = 0.0, bv = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      au += a[s[i]] * u[i];
      av += a[s[i]] * v[i];
      bu += b[s[i]] * u[i];
      bv += b[s[i]] * v[i];
    }
    const double det = au * bv - av * bu;
    if (!(std::abs(det) > 0.0)) return false;
    const double l1 = -(t1 * bv - t2 * av) / det;
    const double l2 = -(au * t2 - bu * t1) / det;
    std::fill(trial.begin(), trial.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) trial[s[i]] = -l1 * u[i] - l2 * v[i];
    q.apply(trial, qx);
    const double tpeak = *std::max_element(trial.begin(), trial.end());
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(l1 * a[i]) + std::abs(l2 * b[i]));
    bool ok = true;
    std::vector<char> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (in[i]) {
        next[i] = trial[i] > 0.0;
        if (trial[i] < -1e-13 * tpeak) ok = false;
      } else {
        const double reduced = qx[i] + l1 * a[i] + l2 * b[i];
        next[i] = reduced < 0.0;
        if (reduced < -1e-10 * scale) ok = false;
      }
    }
    if (ok) {
      for (std::size_t i = 0; i < n; ++i) x[i] = std::max(0.0, trial[i]);
      lam = l1;
      mu = l2;
      return true;
    }
    if (next == in) return false;
    in.swap(next);
  }
  return false;
}

// Projected FISTA with gradient restarts in the metric W = diag(norm
// weights). Both equality constraints hold at every iterate through the
// projection; the multipliers come from the projection's dual variables.
// Dense forms converge slowly this way, so every few hundred iterations the
// current support is handed to the active set solver.
OptimizationResult solve_linear(const QuadraticForm& q, const LinearElements& el, Vec x0,
                                double t1, double t2, FunctionalKind kind,
                                const SolverOptions& opts) {
  const Vec& w = el.norm_weights;
  const std::size_t n = w.size();
  Projector project(w, el.norm_weights, el.variance_weights, t1, t2);
  Vec x;
  project(x0, x);
  Vec qx, y = x, qy, xn(n), qxn, z(n), d(n), qd;
  q.apply(x, qx);
  qy = qx;
  double grad_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) grad_scale += qx[i] * qx[i] / w[i];
  grad_scale = std::max(std::sqrt(grad_scale), 1e-300);
  double L = 1.02 * largest_eigenvalue(q, w);
  double t = 1.0;
  double nu1 = 0.0, nu2 = 0.0, L_at = L;
  std::size_t iterations = 0;
  bool converged = false;
  bool exact = false;
  double lam_exact = 0.0, mu_exact = 0.0;
  const auto* dense = dynamic_cast<const DenseForm*>(&q);
  while (iterations < opts.max_iter) {
    ++iterations;
    if (dense && iterations % 200 == 0) {
      Vec trial = x;
      if (active_set_polish(*dense, el.norm_weights, el.variance_weights, t1, t2, trial, lam_exact,
                            mu_exact)) {
        x.swap(trial);
        q.apply(x, qx);
        exact = converged = true;
        break;
      }
    }
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - qy[i] / (L * w[i]);
      project(z, xn);
      // The objective is quadratic, so sufficient decrease is d^T Q d <= L |d|_W^2.
      for (std::size_t i = 0; i < n; ++i) d[i] = xn[i] - y[i];
      q.apply(d, qd);
      if (dot(d, qd) <= L * (1.0 + 1e-12) * w_norm(d, w) * w_norm(d, w)) break;
      L *= 2.0;
    }
    q.apply(xn, qxn);
    nu1 = project.nu1;
    nu2 = project.nu2;
    L_at = L;
    double gm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = L * (y[i] - xn[i]);
      gm += w[i] * gi * gi;
    }
    const bool done = std::sqrt(gm) <= opts.tol_objective * grad_scale;
    // Gradient restart: drop the momentum once it points uphill. Function
    // values are too flat near the optimum to decide this in double precision.
    double uphill = 0.0;
    for (std::size_t i = 0; i < n; ++i) uphill += w[i] * (y[i] - xn[i]) * (xn[i] - x[i]);
    if (uphill > 0.0) t = 1.0;
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = xn[i] + beta * (xn[i] - x[i]);
      qy[i] = qxn[i] + beta * (qxn[i] - qx[i]);
    }
    x.swap(xn);
    qx.swap(qxn);
    t = tn;
    if (done) {
      converged = true;
      break;
    }
  }

  OptimizationResult out;
  out.kind = kind;
  out.iterations = iterations;
  out.value = 0.5 * dot(x, qx);
  out.lambda = exact ? lam_exact : L_at * nu1;
  out.mu = exact ? mu_exact : L_at * nu2;
  const double c1 = dot(el.norm_weights, x);
  const double c2 = dot(el.variance_weights, x);
  out.norm_err = std::abs(c1 - t1);
  out.var_err = std::abs(c2 / c1 - t2);
  out.converged = converged && out.norm_err <= opts.tol_constraint &&
                  out.var_err <= opts.tol_constraint;
  out.min_value = *std::min_element(x.begin(), x.end());
  out.profile = RadialProfile(el.grid(), x);
  fill_support(out, x, kind);
  return out;
}

// Solves the tridiagonal system M y = rhs (M symmetric positive definite).
void tridiagonal_solve(const Vec& d, const Vec& o, const Vec& rhs, Vec& y) {
  const std::size_t n = d.size();
  Vec c(n), g(n);
  double piv = d[0];
  c[0] = n > 1 ? o[0] / piv : 0.0;
  g[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = d[i] - o[i - 1] * c[i - 1];
    if (i + 1 < n) c[i] = o[i] / piv;
    g[i] = (rhs[i] - o[i - 1] * g[i - 1]) / piv;
  }
  y.resize(n);
  y[n - 1] = g[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) y[i] = g[i] - c[i] * y[i + 1];
}

// GRW in f = sqrt(g): minimize 1/2 f^T S f with f^T A f = 1 and f^T B f = t2.
// Stationarity is (S/2 + mu B) f = -lambda A f, so for fixed mu the optimum
// is the ground state of that pencil (found by inverse iteration), and mu is
// fixed by the variance constraint.
OptimizationResult solve_grw(const LinearElements& el, Vec f0, double t2,
                             const SolverOptions& opts) {
  const auto S = el.stiffness();
  const auto A = el.mass(2);
  const auto B = el.mass(4);
  const std::size_t n = f0.size();
  std::size_t iterations = 0;
  bool inner_ok = true;
  Vec v = std::move(f0), av, y, mv;
  double kappa = 0.0;

  auto normalize = [&](Vec& u) {
    A.apply(u, av);
    const double s = std::sqrt(dot(u, av));
    const double sign = std::accumulate(u.begin(), u.end(), 0.0) < 0.0 ? -1.0 : 1.0;
    for (double& x : u) x *= sign / s;
  };
  auto ground_state = [&](double mu) {
    Vec d = S.diag(), o = S.off();
    for (std::size_t i = 0; i < n; ++i) d[i] = 0.5 * d[i] + mu * B.diag()[i];
    for (std::size_t i = 0; i + 1 < n; ++i) o[i] = 0.5 * o[i] + mu * B.off()[i];
    normalize(v);
    for (int it = 0; it < 2000; ++it) {
      if (iterations >= opts.max_iter) {
        inner_ok = false;
        break;
      }
      ++iterations;
      A.apply(v, av);
      tridiagonal_solve(d, o, av, y);
      normalize(y);
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(y[i] - v[i]));
      v.swap(y);
      if (change <= 1e-14 * *std::max_element(v.begin(), v.end())) break;
    }
    TridiagonalForm m(d, o);
    m.apply(v, mv);
    kappa = dot(v, mv);
    Vec bv;
    B.apply(v, bv);
    return dot(v, bv);
  };

  // The variance decreases monotonically in mu; bracket in log mu.
  const double scale = 1.0 / (t2 * t2);
  auto h = [&](double lm) { return ground_state(scale * std::exp(lm)) - t2; };
  boost::uintmax_t iters = 100;
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(a)); };
  double lm = 0.0;
  try {
    const auto [lo, hi] = boost::math::tools::toms748_solve(h, -25.0, 15.0, tol, iters);
    lm = 0.5 * (lo + hi);
  } catch (const std::exception&) {
    inner_ok = false;
  }
  const double mu = scale * std::exp(lm);
  const double var = ground_state(mu);

  OptimizationResult out;
  out.kind = FunctionalKind::GRW;
  out.iterations = iterations;
  Vec sv;
  S.apply(v, sv);
  out.value = 0.5 * dot(v, sv);
  out.lambda = -kappa;
  out.mu = mu;
  A.apply(v, av);
  const double c1 = dot(v, av);
  out.norm_err = std::abs(c1 - 1.0);
  out.var_err = std::abs(var / c1 - t2);
  out.converged = inner_ok && out.norm_err <= opts.tol_constraint &&
                  out.var_err <= opts.tol_constraint;
  out.min_value = *std::min_element(v.begin(), v.end());
  // g = f^2 is exactly quadratic on each element.
  std::vector<double> breaks = el.r;
  RadialGrid grid(std::move(breaks), 3);
  std::vector<double> g(grid.size());
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double a = v[e];
    const double b = v[e + 1];
    g[2 * e] = a * a;
    g[2 * e + 1] = 0.25 * (a + b) * (a + b);
    g[2 * e + 2] = b * b;
  }
  out.profile = RadialProfile(std::move(grid), std::move(g));
  return out;
}

Vec initial_profile(const LinearElements& el, const SolverOptions& opts, bool take_sqrt) {
  const ClosedFormProfile gauss{ProfileKind::Gaussian, opts.r_c};
  Vec x(el.r.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = gauss(el.r[i]);
  if (opts.seed) {
    std::mt19937_64 rng(*opts.seed);
    std::uniform_real_distribution<double> amp(-0.3, 0.3), phase(0.0, 2.0 * pi);
    double a[3], p[3];
    for (int m = 0; m < 3; ++m) {
      a[m] = amp(rng);
      p[m] = phase(rng);
    }
    const double len = el.r.back();
    for (std::size_t i = 0; i < x.size(); ++i) {
      double f = 1.0;
      for (int m = 0; m < 3; ++m) f += a[m] * std::sin((m + 1) * pi * el.r[i] / len * 4.0 + p[m]);
      x[i] *= std::max(f, 0.0);
    }
  }
  if (take_sqrt)
    for (double& v : x) v = std::sqrt(v);
  return x;
}

void check_options(const SolverOptions& opts) {
  if (opts.n_points < 50) throw InvalidInput("the optimizer needs at least 50 grid points");
  if (!(opts.tol_constraint > 0.0) || !(opts.tol_objective > 0.0))
    throw InvalidInput("solver tolerances must be positive");
  if (!(opts.r_max > 0.0) || !(opts.r_c > 0.0)) throw InvalidInput("r_max and r_c must be positive");
  if (opts.max_iter == 0) throw InvalidInput("max_iter must be positive");
}

} // namespace

OptimizationResult minimize_quadratic(const QuadraticForm& q, const LinearElements& el,
                                      FunctionalKind kind, const SolverOptions& opts) {
  check_options(opts);
  if (q.size() != el.r.size()) throw InvalidInput("objective size does not match the grid");
  return solve_linear(q, el, initial_profile(el, opts, false), 1.0, 3.0 * opts.r_c * opts.r_c,
                      kind, opts);
}

OptimizationResult minimize(FunctionalKind kind, const SolverOptions& opts) {
  check_options(opts);
  const LinearElements el(opts.n_points, opts.r_max * opts.r_c);
  switch (kind) {
  case FunctionalKind::CSL:
    return minimize_quadratic(el.stiffness(), el, kind, opts);
  case FunctionalKind::DP: {
    const auto m = el.mass(2);
    std::vector<double> d = m.diag(), o = m.off();
    for (double& v : d) v *= 2.0 * pi;
    for (double& v : o) v *= 2.0 * pi;
    return minimize_quadratic(TridiagonalForm(std::move(d), std::move(o)), el, kind, opts);
  }
  case FunctionalKind::GRW: {
    return solve_grw(el, initial_profile(el, opts, true), 3.0 * opts.r_c * opts.r_c, opts);
  }
  }
  throw UnsupportedKind("unknown functional kind");
}

namespace {

// int_0^R r^p shape(r) dr by Gauss-Legendre (the shapes are polynomials).
template <class Shape>
double moment(Shape shape, double R, int p) {
  const auto& rule = gauss_legendre(16);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double r = 0.5 * R * (1.0 + rule.nodes[q]);
    s += rule.weights[q] * std::pow(r, p) * shape(r, R);
  }
  return 0.5 * R * s;
}

template <class Shape>
double support_from_variance(Shape shape, double target) {
  auto f = [&](double R) { return moment(shape, R, 4) / moment(shape, R, 2) - target; };
  boost::uintmax_t iters = 200;
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::abs(a); };
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.1, 100.0, tol, iters);
  return 0.5 * (lo + hi);
}

} // namespace

EulerLagrangeSolution solve_euler_lagrange(FunctionalKind kind, std::size_t n_points) {
  EulerLagrangeSolution s;
  s.kind = kind;
  switch (kind) {
  case FunctionalKind::GRW:
    throw UnsupportedKind(
        "GRW has no Euler-Lagrange closed form here; its optimum is the Gaussian, use "
        "make_closed_form(Gaussian)");
  case FunctionalKind::CSL: {
    // g(R) = g'(R) = 0 leave g = C (R^2 - r^2)^2.
    auto shape = [](double r, double R) { return (R * R - r * r) * (R * R - r * r); };
    s.R = support_from_variance(shape, 3.0);
    const double C = 1.0 / (4.0 * pi * moment(shape, s.R, 2));
    s.c = C * std::pow(s.R, 4);
    s.lambda = -12.0 * C * s.R * s.R;
    s.mu = 20.0 * C;
    const double R = s.R;
    const std::vector<double> ends{R};
    auto grid = RadialGrid::segmented(ends, (n_points + 5) / 7, kDefaultPanelOrder);
    s.profile = RadialProfile::sample(std::move(grid),
                                      [&](double r) { return C * shape(std::min(r, R), R); }, R);
    return s;
  }
  case FunctionalKind::DP: {
    // 2 pi g + lambda + mu r^2 = 0 with g(R) = 0 gives lambda = -mu R^2.
    auto shape = [](double r, double R) { return R * R - r * r; };
    s.R = support_from_variance(shape, 3.0);
    const double amp = 1.0 / (4.0 * pi * moment(shape, s.R, 2));  // mu / (2 pi)
    s.mu = 2.0 * pi * amp;
    s.lambda = -s.mu * s.R * s.R;
    s.c = amp * s.R * s.R;
    const double R = s.R;
    const std::vector<double> ends{R};
    auto grid = RadialGrid::segmented(ends, (n_points + 5) / 7, kDefaultPanelOrder);
    s.profile = RadialProfile::sample(std::move(grid),
                                      [&](double r) { return amp * shape(std::min(r, R), R); }, R);
    return s;
  }
  }
  throw UnsupportedKind("unknown functional kind");
}

ProfileKind optimal_profile_kind(FunctionalKind kind) {
  switch (kind) {
  case FunctionalKind::GRW:
    return ProfileKind::Gaussian;
  case FunctionalKind::CSL:
    return ProfileKind::CslOptimal;
  case FunctionalKind::DP:
    return ProfileKind::DpOptimal;
  }
  return ProfileKind::Gaussian;
}

double gaussian_penalty(FunctionalKind kind) {
  const auto gauss = evaluate_heating(kind, make_closed_form({ProfileKind::Gaussian, 1.0}));
  const auto best = evaluate_heating(kind, make_closed_form({optimal_profile_kind(kind), 1.0}));
  return 100.0 * (gauss.geometric_value / best.geometric_value - 1.0);
}

} // namespace minheat
