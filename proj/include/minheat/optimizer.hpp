#pragma once

#include "minheat/functionals.hpp"
#include "minheat/profiles.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace minheat {

// Unit norm and variance 3 r_c^2, non-negativity always imposed.
struct ConstraintSet {
  double target_norm = 1.0;
  double target_variance = 3.0;
  bool nonneg = true;

  static ConstraintSet for_length(double r_c) { return {1.0, 3.0 * r_c * r_c, true}; }
};

struct SolverOptions {
  std::size_t n_points = 400;
  double tol_constraint = 1e-8;
  double tol_objective = 1e-9;
  std::size_t max_iter = 200000;
  double r_max = 10.0;  // in units of r_c
  std::optional<std::uint64_t> seed;  // perturbs the Gaussian starting point
  double r_c = 1.0;
};

struct OptimizationResult {
  FunctionalKind kind = FunctionalKind::CSL;
  RadialProfile profile;
  double value = 0.0;
  // Stationarity dF + lambda d(norm) + mu d(int r^2 g) = 0 on the positive set.
  double lambda = 0.0;
  double mu = 0.0;
  double norm_err = 0.0;
  double var_err = 0.0;
  double min_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double support_estimate = 0.0;  // edge of the positive set, 0 if it reaches r_max
};

// Symmetric positive semidefinite matrix acting on nodal values of a
// piecewise-linear profile.
class QuadraticForm {
public:
  virtual ~QuadraticForm() = default;
  virtual std::size_t size() const = 0;
  virtual void apply(const std::vector<double>& x, std::vector<double>& y) const = 0;
};

class TridiagonalForm final : public QuadraticForm {
public:
  TridiagonalForm(std::vector<double> diag, std::vector<double> off);
  std::size_t size() const override { return diag_.size(); }
  void apply(const std::vector<double>& x, std::vector<double>& y) const override;
  const std::vector<double>& diag() const { return diag_; }
  const std::vector<double>& off() const { return off_; }

private:
  std::vector<double> diag_, off_;
};

class DenseForm final : public QuadraticForm {
public:
  DenseForm(std::size_t n, std::vector<double> entries);
  std::size_t size() const override { return n_; }
  void apply(const std::vector<double>& x, std::vector<double>& y) const override;
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

private:
  std::size_t n_;
  std::vector<double> a_;
};

// Uniform piecewise-linear discretization on [0, r_max] with n nodes.
struct LinearElements {
  LinearElements(std::size_t n, double r_max);

  std::vector<double> r;
  double h;
  std::vector<double> norm_weights;      // 4 pi int r^2 phi_i
  std::vector<double> variance_weights;  // 4 pi int r^4 phi_i

  // 4 pi int r^2 phi_i' phi_j' dr, so that 1/2 x^T S x = dirichlet energy.
  TridiagonalForm stiffness() const;
  // 4 pi int r^p phi_i phi_j dr.
  TridiagonalForm mass(int power) const;
  RadialGrid grid() const;
};

// Minimizes the kind's heating functional under the norm and variance
// constraints on a uniform piecewise-linear grid. CSL and DP: projected FISTA
// with an exact projection onto the constraint set. GRW optimizes sqrt(g) as
// the ground state of (S/2 + mu B) f = -lambda A f, with mu fixed by the
// variance constraint.
OptimizationResult minimize(FunctionalKind kind, const SolverOptions& opts = {});

// Same solver for an arbitrary quadratic objective 1/2 x^T Q x over g >= 0.
// `kind` only labels the result.
OptimizationResult minimize_quadratic(const QuadraticForm& q, const LinearElements& elements,
                                      FunctionalKind kind, const SolverOptions& opts);

struct EulerLagrangeSolution {
  FunctionalKind kind = FunctionalKind::CSL;
  double R = 0.0;       // support radius
  double c = 0.0;       // g(0)
  double lambda = 0.0;  // multiplier of the norm constraint
  double mu = 0.0;      // multiplier of the second-moment constraint
  RadialProfile profile;
};

// Closed-form stationary profile with the boundary conditions at R, with R
// and the amplitude fixed by root finding on the constraints.
// CSL: g = c + lambda r^2/6 + mu r^4/20 with g(R) = g'(R) = 0.
// DP: g = -(lambda + mu r^2) / (2 pi) with g(R) = 0.
EulerLagrangeSolution solve_euler_lagrange(FunctionalKind kind, std::size_t n_points = 281);

// 100 (F[Gaussian] / F[optimal] - 1).
double gaussian_penalty(FunctionalKind kind);

// Profile minimizing the kind's functional in closed form (Gaussian for GRW).
ProfileKind optimal_profile_kind(FunctionalKind kind);

} // namespace minheat
