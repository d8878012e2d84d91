#pragma once

#include <Eigen/Core>
#include <complex>

namespace crflow {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Point of S^{2n+1} in C^{n+1}; the last coordinate is the chart pole axis.
class SpherePoint {
 public:
  /// Throws InvalidArgument unless |x| = 1 within 1e-12.
  explicit SpherePoint(CVec x);

  static SpherePoint normalized(const CVec& x);
  static SpherePoint north(int n);
  static SpherePoint south(int n);

  int n() const { return static_cast<int>(x_.size()) - 1; }
  const CVec& coords() const { return x_; }
  cplx operator[](Eigen::Index i) const { return x_[i]; }

 private:
  CVec x_;
};

/// Point (z, tau) of the Heisenberg group H^n = C^n x R.
struct HeisenbergPoint {
  CVec z;
  double tau = 0.0;

  int n() const { return static_cast<int>(z.size()); }
  static HeisenbergPoint origin(int n) { return {CVec::Zero(n), 0.0}; }
};

/// phi = U o Psi o T_q o D_r o pi o U^{-1}.
class CRAutomorphism {
 public:
  /// Throws InvalidArgument if U is not unitary to 1e-12 or sizes disagree,
  /// NonPositiveScale if r <= 0.
  CRAutomorphism(CMat pole_rotation, HeisenbergPoint q, double r);

  static CRAutomorphism identity(int n);

  int n() const { return q_.n(); }
  const CMat& pole_rotation() const { return U_; }
  const HeisenbergPoint& q() const { return q_; }
  double r() const { return r_; }

  /// Same rotation, (T_q D_r)^{-1} = T_{D_{1/r}(q^{-1})} D_{1/r}.
  CRAutomorphism inverse() const;

 private:
  CMat U_;
  HeisenbergPoint q_;
  double r_;
};

inline constexpr double kPoleThreshold = 1e-12;

/// Cayley transform pi : S^{2n+1} \ {south} -> H^n. Throws PoleSingularity.
HeisenbergPoint cayley_forward(const SpherePoint& x);
/// Psi = pi^{-1}.
SpherePoint cayley_inverse(const HeisenbergPoint& h);

/// D_lambda(z, tau) = (lambda z, lambda^2 tau). Throws NonPositiveScale.
HeisenbergPoint dilate(const HeisenbergPoint& h, double lambda);
/// Left translation T_q(z, tau) = (z + z', tau + tau' + 2 Im(z' . conj z)).
HeisenbergPoint translate(const HeisenbergPoint& h, const HeisenbergPoint& q);
/// Group product a * b = T_a(b).
HeisenbergPoint heisenberg_product(const HeisenbergPoint& a, const HeisenbergPoint& b);
HeisenbergPoint heisenberg_inverse(const HeisenbergPoint& a);
/// delta_{q,r}(z,tau) = (r z + z', r^2 tau + tau' + 2 r Im(z' . conj z)), coded directly.
HeisenbergPoint delta(const HeisenbergPoint& h, const HeisenbergPoint& q, double r);

SpherePoint apply(const CRAutomorphism& phi, const SpherePoint& x);

/// Density of Psi^*(dV_theta0) against dz dtau: (4 / ((1+|z|^2)^2 + tau^2))^{n+1}.
double volume_density(const HeisenbergPoint& h);
double volume_density(double z_norm_sq, double tau, int n);

/// |det d phi|(x) with respect to dV_theta0.
double jacobian_factor(const CRAutomorphism& phi, const SpherePoint& x);

/// Householder-type unitary with U e_{n+1} = target.
CMat pole_rotation_to(const SpherePoint& target);

/// Geodesic distance of the round unit sphere.
double round_distance(const SpherePoint& a, const SpherePoint& b);

}  // namespace crflow
