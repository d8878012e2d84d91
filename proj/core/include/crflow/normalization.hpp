#pragma once

#include <optional>

#include "crflow/heisenberg.hpp"
#include "crflow/spectral.hpp"

namespace crflow {

struct CenterOfMass {
  CVec P;
  /// P / |P| when |P| > 1e-12, otherwise P itself.
  CVec P_hat;
};

/// P = integral of x u^{2+2/n} dV_theta0.
CenterOfMass center_of_mass(const Field& u);
CenterOfMass center_of_mass_values(const Basis& basis, const Eigen::VectorXd& u_values);

/// apply() extended to the chart pole U * south, which every (U, q, r) fixes.
SpherePoint apply_extended(const CRAutomorphism& phi, const SpherePoint& x);
/// jacobian_factor() extended to the chart pole, where it equals r^{-(2n+2)}.
double jacobian_extended(const CRAutomorphism& phi, const SpherePoint& x);

struct CenteringOptions {
  double tolerance = 1e-8;
  int max_iter = 100;
  double fd_step = 1e-6;
  double condition_limit = 1e8;
  /// Skip building the normalized factor v (only phi and the residual are needed).
  bool compute_v = true;
};

struct CenteringResult {
  CRAutomorphism phi;
  std::optional<Field> v;
  double residual = 0.0;
  double eps = 1.0;
  bool converged = false;
  int iterations = 0;
  bool used_bisection = false;
};

/// Center of mass of dV_h for h = phi^* (u^{2/n} theta0), computed as the integral of
/// phi^{-1}(y) u(y)^{2+2/n} dV_theta0(y).
CVec centered_mass(const CRAutomorphism& phi, const Basis& basis, const Eigen::VectorXd& weighted_density);

/// Damped Newton in (Re z', Im z', tau', log r) with the pole rotation fixed so that the chart
/// singularity sits at P_hat; bisection in r along the P_hat axis when the finite-difference
/// Jacobian is ill-conditioned. Returns the best iterate with converged = false on failure.
CenteringResult find_centering(const Field& u, const CenteringOptions& options = {});

/// v = (u o phi) |det d phi|^{n/(2n+2)} at the nodes.
Eigen::VectorXd normalized_factor_values(const Field& u, const CRAutomorphism& phi);

struct ShadowPoint {
  CVec Theta;
  CVec Theta_hat;
  double eps = 1.0;
};

/// Theta = integral of phi dV_theta0 on the quadrature grid.
ShadowPoint shadow(const CenteringResult& centering, const Basis& basis);
/// Runs find_centering first; throws NoConvergence when centering fails.
ShadowPoint shadow(const Field& u, const CenteringOptions& options = {});

}  // namespace crflow
