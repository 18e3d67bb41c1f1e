#pragma once

#include <vector>

namespace esgs::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre on [-1, 1].
const Rule& legendre(int n);
/// Generalized Gauss-Laguerre for the weight v^alpha e^{-v} on [0, inf).
const Rule& laguerre(int n, double alpha);
/// Gauss-Hermite for the standard normal density (weights sum to 1).
const Rule& hermite(int n);

}  // namespace esgs::quadrature
