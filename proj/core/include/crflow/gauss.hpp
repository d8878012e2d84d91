#pragma once

#include <vector>

namespace crflow {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// N-point Gauss-Legendre rule on [lo, hi].
GaussRule gauss_legendre(int points, double lo = 0.0, double hi = 1.0);

/// N-point Gauss-Jacobi rule on [0, 1] for the weight (1 - t)^alpha.
GaussRule gauss_jacobi_unit(int points, double alpha);

}  // namespace crflow
