#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace minheat {

// Nodes and weights on the reference interval [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// m-point Gauss-Legendre rule, exact for polynomials of degree 2m-1.
const QuadratureRule& gauss_legendre(int m);

// p-point Gauss-Lobatto-Legendre rule (endpoints included), exact to degree 2p-3.
const QuadratureRule& gauss_lobatto(int p);

// Barycentric weights for Lagrange interpolation through `nodes`.
std::vector<double> barycentric_weights(std::span<const double> nodes);

// Row-major n x n differentiation matrix of the Lagrange interpolant through `nodes`.
std::vector<double> differentiation_matrix(std::span<const double> nodes);

// Evaluates the interpolant through (nodes, values) at x.
double barycentric_eval(std::span<const double> nodes, std::span<const double> bary,
                        std::span<const double> values, double x);

// Row-major (targets x nodes) matrix mapping nodal values to interpolant values at targets.
std::vector<double> interpolation_matrix(std::span<const double> nodes,
                                         std::span<const double> targets);

} // namespace minheat
