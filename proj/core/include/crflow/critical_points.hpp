#pragma once

#include <cstdint>
#include <vector>

#include "crflow/morse.hpp"
#include "crflow/polynomial.hpp"

namespace crflow {

/// Gradient of a real polynomial restricted to the sphere, as a complex (n+1)-vector
/// (tangential part of the Euclidean gradient, packed as Re + i Im).
CVec sphere_gradient(const Polynomial& f, const SpherePoint& x);

/// Riemannian Hessian on the 2n+1 dimensional tangent space at x, in an orthonormal frame.
Eigen::MatrixXd sphere_hessian(const Polynomial& f, const SpherePoint& x);

/// Sub-Laplacian of f at x.
double sub_laplacian_at(const Polynomial& f, const SpherePoint& x);

struct CriticalPointSearch {
  int seeds = 400;
  std::uint64_t seed = 1;
  int max_newton = 60;
  double gradient_tolerance = 1e-11;
  /// Points closer than this (round distance) are merged.
  double merge_distance = 1e-6;
};

/// Best-effort critical point finder: Riemannian Newton from random seeds, index from the
/// Hessian eigenvalue signs and the Laplacian sign from the symbolic sub-Laplacian. The
/// returned data carries f_max and f_min over the critical values found.
MorseData find_critical_points(const Polynomial& f, const CriticalPointSearch& options = {});

}  // namespace crflow
