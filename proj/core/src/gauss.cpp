#include "crflow/gauss.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "crflow/errors.hpp"

namespace crflow {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1].
GaussRule golub_welsch_jacobi(int points, double alpha, double beta) {
  if (points < 1) fail(ErrorKind::InvalidArgument, "Gauss rule needs at least one point");
  Eigen::VectorXd diag(points);
  Eigen::VectorXd sub(std::max(points - 1, 1));
  const double ab = alpha + beta;
  for (int k = 0; k < points; ++k) {
    const double s = 2.0 * k + ab;
    diag[k] = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (int k = 1; k < points; ++k) {
    const double s = 2.0 * k + ab;
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    sub[k - 1] = std::sqrt(num / den);
  }
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
  GaussRule rule;
  if (points == 1) {
    rule.nodes = {diag[0]};
    rule.weights = {mu0};
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(points - 1), Eigen::ComputeEigenvectors);
  rule.nodes.resize(static_cast<size_t>(points));
  rule.weights.resize(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<size_t>(i)] = solver.eigenvalues()[i];
    rule.weights[static_cast<size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

GaussRule gauss_legendre(int points, double lo, double hi) {
  GaussRule ref = golub_welsch_jacobi(points, 0.0, 0.0);
  const double half = 0.5 * (hi - lo);
  for (size_t i = 0; i < ref.nodes.size(); ++i) {
    ref.nodes[i] = lo + half * (ref.nodes[i] + 1.0);
    ref.weights[i] *= half;
  }
  return ref;
}

GaussRule gauss_jacobi_unit(int points, double alpha) {
  GaussRule ref = golub_welsch_jacobi(points, alpha, 0.0);
  const double scale = std::pow(2.0, -alpha - 1.0);
  for (size_t i = 0; i < ref.nodes.size(); ++i) {
    ref.nodes[i] = 0.5 * (ref.nodes[i] + 1.0);
    ref.weights[i] *= scale;
  }
  return ref;
}

}  // namespace crflow
