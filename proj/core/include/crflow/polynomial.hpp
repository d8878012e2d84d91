#pragma once

#include <map>
#include <vector>

#include "crflow/heisenberg.hpp"

namespace crflow {

/// Exponent pair of z^a conj(z)^b on C^{n+1}.
struct Monomial {
  std::vector<int> a;
  std::vector<int> b;

  int holomorphic_degree() const;
  int antiholomorphic_degree() const;
  int degree() const { return holomorphic_degree() + antiholomorphic_degree(); }
  Monomial conjugate() const { return {b, a}; }

  auto operator<=>(const Monomial&) const = default;
};

/// Polynomial in (z, conj z) on C^{n+1}, used for restrictions to S^{2n+1}.
class Polynomial {
 public:
  explicit Polynomial(int n) : n_(n) {}

  static Polynomial constant(int n, cplx c);
  static Polynomial coordinate(int n, int j);
  static Polynomial coordinate_conj(int n, int j);
  static Polynomial monomial(int n, Monomial m, cplx c = 1.0);

  int n() const { return n_; }
  int degree() const;
  const std::map<Monomial, cplx>& terms() const { return terms_; }

  void add_term(const Monomial& m, cplx c);
  Polynomial conj() const;
  Polynomial real_part() const;
  Polynomial d_dz(int j) const;
  Polynomial d_dzbar(int j) const;

  cplx operator()(const CVec& x) const;
  cplx operator()(const SpherePoint& x) const { return (*this)(x.coords()); }

  /// Real Euclidean gradient in R^{2n+2} ordered (Re z_1, Im z_1, ...); assumes a real-valued polynomial.
  Eigen::VectorXd real_gradient(const CVec& x) const;
  Eigen::MatrixXd real_hessian(const CVec& x) const;

  /// Sub-Laplacian of the restriction, by (Delta_round - T^2)/4 applied monomial by monomial.
  Polynomial sub_laplacian() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(cplx s) const;

 private:
  int n_;
  std::map<Monomial, cplx> terms_;
};

/// All exponent pairs with total degree <= max_degree and a_{n+1} b_{n+1} = 0.
/// Their restrictions form a basis of polynomials of degree <= max_degree on the sphere.
std::vector<Monomial> reduced_monomials(int n, int max_degree);

/// Evaluates z^a conj(z)^b using cached powers.
class MonomialEvaluator {
 public:
  MonomialEvaluator(int n, int max_degree);
  void set_point(const CVec& x);
  cplx value(const Monomial& m) const;
  /// d/dz_j of the monomial at the current point.
  cplx d_dz(const Monomial& m, int j) const;

 private:
  int n_;
  int max_degree_;
  std::vector<cplx> zpow_;   // (n+1) x (max_degree+1)
  std::vector<cplx> zbpow_;
  cplx zp(int j, int e) const { return zpow_[static_cast<size_t>(j * (max_degree_ + 1) + e)]; }
  cplx zbp(int j, int e) const { return zbpow_[static_cast<size_t>(j * (max_degree_ + 1) + e)]; }
};

}  // namespace crflow
