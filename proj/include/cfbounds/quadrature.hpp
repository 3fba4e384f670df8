#pragma once

#include <vector>

namespace cfbounds {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Physicists' Gauss-Hermite rule: sum w_i f(x_i) ~ int f(x) exp(-x^2) dx.
/// Rules are computed once per order and shared read-only.
const QuadratureRule& gauss_hermite(int order);

/// Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int order);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

}  // namespace cfbounds
