#pragma once

#include <vector>

namespace kirchhoff {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1], nodes ascending.
QuadratureRule gauss_legendre(int n);

/// Gauss–Legendre rule mapped affinely onto [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// `panels` equal panels on [a, b], each carrying an `order`-point Gauss–Legendre rule.
QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b);

}  // namespace kirchhoff
