#pragma once

#include "crflow/heisenberg.hpp"
#include "crflow/spectral.hpp"

namespace crflow {

/// The automorphism phi_{-p,eps}: pole rotation sending the north pole to -p, q = 0, r = eps.
/// Its chart singularity sits at p, where the bubble peaks.
CRAutomorphism bubble_automorphism(const SpherePoint& p, double eps);

/// u_{p,eps}(x) = |det d phi_{-p,eps}|^{n/(2n+2)}(x), in the closed form
/// (2 eps / |(1 + w) + eps^2 (1 - w)|)^n with w = -<x, p>, valid at p as well.
double bubble_value(const SpherePoint& p, double eps, const SpherePoint& x);

/// Bubble samples at every quadrature node.
Eigen::VectorXd bubble_node_values(const SpherePoint& p, double eps, const Basis& basis);

struct BubbleField {
  Field field;
  /// Relative L2 distance between the pointwise bubble and its projection on the grid.
  double residual = 0.0;
};

/// Projected bubble. Throws TruncationLoss when the residual exceeds tolerance or the
/// projection fails to stay positive on the grid.
BubbleField bubble_field(const SpherePoint& p, double eps, const BasisPtr& basis, double tolerance = 5e-2);

inline Field bubble(const SpherePoint& p, double eps, const BasisPtr& basis, double tolerance = 5e-2) {
  return bubble_field(p, eps, basis, tolerance).field;
}

}  // namespace crflow
