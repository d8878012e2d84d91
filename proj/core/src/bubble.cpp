#include "crflow/bubble.hpp"

#include <cmath>
#include <string>

#include "crflow/errors.hpp"

namespace crflow {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0) || !(eps <= 1.0)) fail(ErrorKind::InvalidArgument, "bubble: eps must lie in (0, 1]");
}

double bubble_from_pairing(cplx pairing, double eps, int n) {
  const cplx w = -pairing;
  const double denom = std::abs((1.0 + w) + eps * eps * (1.0 - w));
  return std::pow(2.0 * eps / denom, n);
}

}  // namespace

CRAutomorphism bubble_automorphism(const SpherePoint& p, double eps) {
  check_eps(eps);
  return CRAutomorphism(pole_rotation_to(SpherePoint(-p.coords())), HeisenbergPoint::origin(p.n()), eps);
}

double bubble_value(const SpherePoint& p, double eps, const SpherePoint& x) {
  check_eps(eps);
  if (p.n() != x.n()) fail(ErrorKind::InvalidArgument, "bubble_value: dimension mismatch");
  return bubble_from_pairing(p.coords().dot(x.coords()), eps, p.n());
}

Eigen::VectorXd bubble_node_values(const SpherePoint& p, double eps, const Basis& basis) {
  check_eps(eps);
  if (p.n() != basis.n()) fail(ErrorKind::InvalidArgument, "bubble: dimension mismatch");
  const Eigen::Index N = basis.node_count();
  Eigen::VectorXd vals(N);
  const CVec pairings = basis.node_coords().adjoint() * p.coords();
  for (Eigen::Index k = 0; k < N; ++k) vals[k] = bubble_from_pairing(std::conj(pairings[k]), eps, p.n());
  return vals;
}

BubbleField bubble_field(const SpherePoint& p, double eps, const BasisPtr& basis, double tolerance) {
  const Eigen::VectorXd vals = bubble_node_values(p, eps, *basis);
  Field field = Field::from_values(basis, vals);
  const Eigen::VectorXd diff = field.values() - vals;
  const double num = basis->integrate_values(diff.cwiseAbs2());
  const double den = basis->integrate_values(vals.cwiseAbs2());
  const double residual = std::sqrt(num / den);
  if (!(residual <= tolerance)) {
    fail(ErrorKind::TruncationLoss, "bubble eps=" + std::to_string(eps) + ": projection residual " +
                                        std::to_string(residual) + " exceeds " + std::to_string(tolerance) +
                                        "; raise J");
  }
  if (!(field.min_value() > 0.0)) {
    fail(ErrorKind::TruncationLoss, "bubble eps=" + std::to_string(eps) + ": projection is not positive on the grid");
  }
  return {std::move(field), residual};
}

}  // namespace crflow
