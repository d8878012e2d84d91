#include "crflow/critical_points.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "crflow/errors.hpp"

namespace crflow {

namespace {

Eigen::VectorXd realify(const CVec& x) {
  Eigen::VectorXd v(2 * x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    v[2 * j] = x[j].real();
    v[2 * j + 1] = x[j].imag();
  }
  return v;
}

CVec complexify(const Eigen::VectorXd& v) {
  CVec x(v.size() / 2);
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = cplx(v[2 * j], v[2 * j + 1]);
  return x;
}

// Orthonormal basis of the tangent space x^perp in R^{2n+2}, as columns.
Eigen::MatrixXd tangent_frame(const Eigen::VectorXd& x) {
  const auto dim = x.size();
  Eigen::MatrixXd A(dim, dim);
  A.col(0) = x;
  A.rightCols(dim - 1) = Eigen::MatrixXd::Identity(dim, dim).leftCols(dim - 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(dim - 1);
}

}  // namespace

CVec sphere_gradient(const Polynomial& f, const SpherePoint& x) {
  const Eigen::VectorXd xr = realify(x.coords());
  const Eigen::VectorXd g = f.real_gradient(x.coords());
  return complexify(g - g.dot(xr) * xr);
}

Eigen::MatrixXd sphere_hessian(const Polynomial& f, const SpherePoint& x) {
  const Eigen::VectorXd xr = realify(x.coords());
  const Eigen::VectorXd g = f.real_gradient(x.coords());
  const Eigen::MatrixXd H = f.real_hessian(x.coords());
  const Eigen::MatrixXd T = tangent_frame(xr);
  const Eigen::MatrixXd HT = T.transpose() * H * T - g.dot(xr) * Eigen::MatrixXd::Identity(T.cols(), T.cols());
  return 0.5 * (HT + HT.transpose());
}

double sub_laplacian_at(const Polynomial& f, const SpherePoint& x) { return f.sub_laplacian()(x).real(); }

MorseData find_critical_points(const Polynomial& f, const CriticalPointSearch& options) {
  const int n = f.n();
  const Polynomial lap = f.sub_laplacian();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Found {
    SpherePoint x;
    double value;
  };
  std::vector<Found> found;

  for (int s = 0; s < options.seeds; ++s) {
    Eigen::VectorXd xr(2 * n + 2);
    for (Eigen::Index i = 0; i < xr.size(); ++i) xr[i] = normal(rng);
    xr.normalize();
    bool converged = false;
    for (int it = 0; it < options.max_newton; ++it) {
      const CVec xc = complexify(xr);
      const Eigen::VectorXd g = f.real_gradient(xc);
      const Eigen::VectorXd tg = g - g.dot(xr) * xr;
      if (tg.norm() < options.gradient_tolerance) {
        converged = true;
        break;
      }
      const Eigen::MatrixXd T = tangent_frame(xr);
      const Eigen::MatrixXd H = f.real_hessian(xc);
      const Eigen::MatrixXd HT = T.transpose() * H * T - g.dot(xr) * Eigen::MatrixXd::Identity(T.cols(), T.cols());
      const Eigen::VectorXd rhs = -(T.transpose() * tg);
      Eigen::VectorXd step = HT.colPivHouseholderQr().solve(rhs);
      const double len = step.norm();
      if (!std::isfinite(len)) break;
      if (len > 0.5) step *= 0.5 / len;
      xr = (xr + T * step).normalized();
    }
    if (!converged) continue;
    const SpherePoint x = SpherePoint::normalized(complexify(xr));
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Found& o) {
      return round_distance(o.x, x) < options.merge_distance;
    });
    if (!duplicate) found.push_back({x, f(x).real()});
  }
  if (found.empty()) fail(ErrorKind::NoConvergence, "find_critical_points: no critical point converged");

  MorseData data;
  data.n = n;
  data.f_max = -std::numeric_limits<double>::infinity();
  data.f_min = std::numeric_limits<double>::infinity();
  for (const Found& fp : found) {
    const Eigen::MatrixXd H = sphere_hessian(f, fp.x);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
    CriticalPoint cp;
    cp.index = static_cast<int>((ev.array() < 0.0).count());
    const double l = lap(fp.x).real();
    cp.laplacian_sign = l < 0.0 ? -1 : 1;
    cp.f_value = fp.value;
    cp.location = fp.x;
    data.critical_points.push_back(cp);
    data.f_max = std::max(data.f_max, fp.value);
    data.f_min = std::min(data.f_min, fp.value);
  }
  std::sort(data.critical_points.begin(), data.critical_points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.f_value > b.f_value; });
  return data;
}

}  // namespace crflow
