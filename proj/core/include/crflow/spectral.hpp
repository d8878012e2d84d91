#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "crflow/heisenberg.hpp"
#include "crflow/polynomial.hpp"

namespace crflow {

/// Tag of a real basis function lying in Re(H_{p,q} + H_{q,p}), p >= q.
struct Bidegree {
  int p = 0;
  int q = 0;
  int total() const { return p + q; }
};

struct BasisOptions {
  /// Total polynomial degree integrated exactly by the grid; <= 0 selects 2J + 4.
  int quadrature_degree = 0;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
};

/// Orthonormal real basis of restrictions of bigraded harmonics of degree <= J, with
/// a product quadrature in Hopf-type coordinates x_j = sqrt(s_j) e^{i theta_j}.
///
/// Orthonormality is with respect to the normalized measure dV_theta0 / Vol, so the
/// constant function has coefficient 1 on the first basis function. Quadrature weights
/// sum to Vol(S^{2n+1}, theta0).
class Basis {
 public:
  static std::shared_ptr<const Basis> build(int n, int J, const BasisOptions& options = {});

  int n() const { return n_; }
  int degree() const { return J_; }
  int quadrature_degree() const { return quad_degree_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(eigenvalues_.size()); }
  Eigen::Index node_count() const { return node_coords_.cols(); }
  double volume() const { return volume_; }
  /// The scale c in Delta_theta0 = (Delta_round - T^2) / c, fixed by lambda_{1,0} = n/2.
  double anchor_scale() const { return anchor_scale_; }

  SpherePoint node(Eigen::Index k) const { return SpherePoint(node_coords_.col(k)); }
  const CMat& node_coords() const { return node_coords_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const std::vector<Bidegree>& bidegrees() const { return bidegrees_; }
  /// Values of basis function i at node k.
  const Eigen::MatrixXd& synthesis_matrix() const { return phi_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  /// Column i: coefficients of basis function i over monomials().
  const CMat& monomial_coefficients() const { return monomial_coeffs_; }

  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;
  Eigen::VectorXd analyze(const Eigen::VectorXd& node_values) const;
  /// sum_k w_k g_k.
  double integrate_values(const Eigen::VectorXd& node_values) const;
  /// Coefficient vector of the sub-Laplacian applied to coeffs.
  Eigen::VectorXd apply_sub_laplacian(const Eigen::VectorXd& coeffs) const;

  /// Polynomial (monomial-coefficient) form, for evaluation off the grid.
  CVec polynomial_form(const Eigen::VectorXd& coeffs) const;
  double evaluate(const CVec& polynomial_form, const SpherePoint& x) const;
  /// Column k holds (dU/dz_1, ..., dU/dz_{n+1}) at node k.
  CMat holomorphic_gradient(const CVec& polynomial_form) const;
  /// Horizontal carre du champ Gamma(U, V) at every node: Re[sum dU conj(dV)] - Re[<x,dU> conj(<x,dV>)].
  Eigen::VectorXd carre_du_champ(const CVec& form_u, const CVec& form_v) const;
  Eigen::VectorXd carre_du_champ(const CMat& grad_u, const CMat& grad_v) const;
  /// The polynomial whose restriction is the field with these coefficients.
  Polynomial to_polynomial(const Eigen::VectorXd& coeffs) const;

  Basis with_eigenvalues(Eigen::VectorXd eigenvalues) const;

 private:
  Basis() = default;

  int n_ = 0;
  int J_ = 0;
  int quad_degree_ = 0;
  double volume_ = 0.0;
  double anchor_scale_ = 0.0;
  CMat node_coords_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd eigenvalues_;
  std::vector<Bidegree> bidegrees_;
  Eigen::MatrixXd phi_;
  std::vector<Monomial> monomials_;
  CMat monomial_coeffs_;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Eigenvalue of -Delta_theta0 on H_{p,q} before anchoring: (p+q)(p+q+2n) - (p-q)^2.
double round_minus_reeb_eigenvalue(int p, int q, int n);

/// Scalar function on S^{2n+1}: coefficients in a Basis plus cached node values.
class Field {
 public:
  /// Empty placeholder; only assignment is valid on it.
  Field() = default;
  Field(BasisPtr basis, Eigen::VectorXd coeffs);

  static Field from_values(BasisPtr basis, const Eigen::VectorXd& node_values);
  static Field constant(BasisPtr basis, double value);
  /// Projection of a real polynomial (exact when its degree is <= J).
  static Field from_polynomial(BasisPtr basis, const Polynomial& p);

  const Basis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  const Eigen::VectorXd& values() const { return values_; }

  double at(const SpherePoint& x) const;
  CVec polynomial_form() const { return basis_->polynomial_form(coeffs_); }
  double min_value() const { return values_.minCoeff(); }
  double max_value() const { return values_.maxCoeff(); }

  Field operator+(const Field& o) const;
  Field operator-(const Field& o) const;
  Field operator*(double s) const;

 private:
  BasisPtr basis_;
  Eigen::VectorXd coeffs_;
  Eigen::VectorXd values_;
};

BasisPtr build_basis(int n, int J, const BasisOptions& options = {});
Field analyze(const Eigen::VectorXd& node_values, const BasisPtr& basis);
Field sub_laplacian(const Field& u);
/// |grad_theta0 u|^2 at the quadrature nodes.
Eigen::VectorXd horizontal_grad_sq(const Field& u);
double integrate(const Field& u);

}  // namespace crflow
