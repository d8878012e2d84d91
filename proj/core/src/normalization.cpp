#include "crflow/normalization.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "crflow/errors.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

namespace {

constexpr double kDirectionFloor = 1e-12;

struct MappedNodes {
  CMat points;               // (n+1) x N images
  Eigen::VectorXd jacobian;  // |det d phi| at each source node
};

// Applies phi to every column of X; the chart pole U * south is a fixed point of phi.
MappedNodes map_nodes(const CRAutomorphism& phi, const CMat& X, bool want_jacobian) {
  const int n = phi.n();
  const CMat& U = phi.pole_rotation();
  const CMat Y = U.adjoint() * X;
  const double r = phi.r();
  const HeisenbergPoint& q = phi.q();
  MappedNodes out;
  out.points.resize(n + 1, X.cols());
  if (want_jacobian) out.jacobian.resize(X.cols());
  CVec south = CVec::Zero(n + 1);
  south[n] = -1.0;
  const CVec pole_image = U * south;

  parallel_for(static_cast<std::size_t>(X.cols()), [&](std::size_t lo, std::size_t hi) {
    CVec local(n + 1);
    for (std::size_t kk = lo; kk < hi; ++kk) {
      const auto k = static_cast<Eigen::Index>(kk);
      const cplx last = Y(n, k);
      const cplx denom = 1.0 + last;
      if (std::abs(denom) < kPoleThreshold) {
        out.points.col(k) = pole_image;
        if (want_jacobian) out.jacobian[k] = std::pow(r, -2.0 * (n + 1));
        continue;
      }
      const CVec z = Y.col(k).head(n) / denom;
      const double tau = (cplx(0.0, 1.0) * (1.0 - last) / denom).real();
      const cplx pairing = z.dot(q.z);
      const CVec z2 = r * z + q.z;
      const double tau2 = r * r * tau + q.tau + 2.0 * r * pairing.imag();
      const double zz = z2.squaredNorm();
      const cplx d(1.0 + zz, -tau2);
      local.head(n) = 2.0 * z2 / d;
      local[n] = cplx(1.0 - zz, tau2) / d;
      local /= local.norm();
      out.points.col(k) = U * local;
      if (want_jacobian) {
        const double a0 = 1.0 + z.squaredNorm();
        const double a1 = 1.0 + zz;
        const double ratio = (a0 * a0 + tau * tau) / (a1 * a1 + tau2 * tau2);
        out.jacobian[k] = std::pow(r * r * ratio, n + 1);
      }
    }
  });
  return out;
}

Eigen::VectorXd to_real(const CVec& m) {
  Eigen::VectorXd v(2 * m.size());
  v.head(m.size()) = m.real();
  v.tail(m.size()) = m.imag();
  return v;
}

CVec unit_or_self(const CVec& v) {
  const double norm = v.norm();
  return norm > kDirectionFloor ? CVec(v / norm) : v;
}

struct Chart {
  CMat U;
  int n;

  CRAutomorphism make(const Eigen::VectorXd& theta) const {
    HeisenbergPoint q;
    q.z.resize(n);
    for (int j = 0; j < n; ++j) q.z[j] = cplx(theta[j], theta[n + j]);
    q.tau = theta[2 * n];
    return CRAutomorphism(U, q, std::exp(theta[2 * n + 1]));
  }
};

Eigen::VectorXd density_weights(const Field& u) {
  const Basis& b = u.basis();
  const double p = 2.0 + 2.0 / b.n();
  if (!(u.min_value() > 0.0)) fail(ErrorKind::NonPositiveFactor, "centering requires u > 0 on the grid");
  return b.weights().cwiseProduct(u.values().array().pow(p).matrix());
}

}  // namespace

CenterOfMass center_of_mass_values(const Basis& basis, const Eigen::VectorXd& u_values) {
  const double p = 2.0 + 2.0 / basis.n();
  const Eigen::VectorXd wd = basis.weights().cwiseProduct(u_values.array().pow(p).matrix());
  CenterOfMass cm;
  cm.P = basis.node_coords() * wd.cast<cplx>();
  cm.P_hat = unit_or_self(cm.P);
  return cm;
}

CenterOfMass center_of_mass(const Field& u) { return center_of_mass_values(u.basis(), u.values()); }

SpherePoint apply_extended(const CRAutomorphism& phi, const SpherePoint& x) {
  CMat X(x.n() + 1, 1);
  X.col(0) = x.coords();
  const CVec y = map_nodes(phi, X, false).points.col(0);
  return SpherePoint(y / y.norm());
}

double jacobian_extended(const CRAutomorphism& phi, const SpherePoint& x) {
  CMat X(x.n() + 1, 1);
  X.col(0) = x.coords();
  return map_nodes(phi, X, true).jacobian[0];
}

CVec centered_mass(const CRAutomorphism& phi, const Basis& basis, const Eigen::VectorXd& weighted_density) {
  const MappedNodes back = map_nodes(phi.inverse(), basis.node_coords(), false);
  return back.points * weighted_density.cast<cplx>();
}

CenteringResult find_centering(const Field& u, const CenteringOptions& options) {
  const Basis& basis = u.basis();
  const int n = basis.n();
  const Eigen::VectorXd wd = density_weights(u);
  const CenterOfMass cm = center_of_mass(u);

  Chart chart;
  chart.n = n;
  if (cm.P.norm() > kDirectionFloor) {
    chart.U = pole_rotation_to(SpherePoint::normalized(-cm.P_hat));
  } else {
    chart.U = CMat::Identity(n + 1, n + 1);
  }

  const int dim = 2 * n + 2;
  auto residual_vec = [&](const Eigen::VectorXd& theta) { return to_real(centered_mass(chart.make(theta), basis, wd)); };

  // Initial dilation from a scan along the P_hat axis.
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd F = residual_vec(theta);
  double best = F.norm();
  for (int i = 1; i <= 40; ++i) {
    Eigen::VectorXd trial = Eigen::VectorXd::Zero(dim);
    trial[dim - 1] = std::log(100.0) * i / 40.0;
    const Eigen::VectorXd Ft = residual_vec(trial);
    if (Ft.norm() < best) {
      best = Ft.norm();
      theta = trial;
      F = Ft;
    }
  }

  CenteringResult result{chart.make(theta), std::nullopt, best, 1.0 / std::exp(theta[dim - 1]), false, 0, false};

  for (int iter = 0; iter < options.max_iter && best >= options.tolerance; ++iter) {
    Eigen::MatrixXd Jac(dim, dim);
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd shifted = theta;
      const double h = options.fd_step * std::max(1.0, std::abs(theta[i]));
      shifted[i] += h;
      Jac.col(i) = (residual_vec(shifted) - F) / h;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jac);
    const auto& sv = svd.singularValues();
    const double cond = sv[dim - 1] > 0.0 ? sv[0] / sv[dim - 1] : std::numeric_limits<double>::infinity();

    Eigen::VectorXd step;
    if (cond > options.condition_limit) {
      // Bisection in log r with q = 0 on the signed axial component.
      result.used_bisection = true;
      const CVec axis = chart.U.col(n);
      auto axial = [&](double logr) {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
        t[dim - 1] = logr;
        return -centered_mass(chart.make(t), basis, wd).dot(axis).real();
      };
      double lo = -std::log(1e4);
      double hi = std::log(1e4);
      double flo = axial(lo);
      if (flo * axial(hi) > 0.0) break;
      for (int b = 0; b < 100 && hi - lo > 1e-14; ++b) {
        const double mid = 0.5 * (lo + hi);
        const double fm = axial(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      step = Eigen::VectorXd::Zero(dim);
      step[dim - 1] = 0.5 * (lo + hi);
      step -= theta;
    } else {
      step = Jac.colPivHouseholderQr().solve(-F);
    }

    bool accepted = false;
    double lambda = 1.0;
    for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
      const Eigen::VectorXd trial = theta + lambda * step;
      Eigen::VectorXd Ft;
      try {
        Ft = residual_vec(trial);
      } catch (const Error&) {
        continue;
      }
      if (Ft.norm() < best) {
        theta = trial;
        F = Ft;
        best = Ft.norm();
        accepted = true;
        break;
      }
    }
    result.iterations = iter + 1;
    if (!accepted) break;
  }

  result.phi = chart.make(theta);
  result.residual = best;
  result.eps = 1.0 / result.phi.r();
  result.converged = best < options.tolerance;
  if (options.compute_v) {
    result.v = Field::from_values(u.basis_ptr(), normalized_factor_values(u, result.phi));
  }
  return result;
}

Eigen::VectorXd normalized_factor_values(const Field& u, const CRAutomorphism& phi) {
  const Basis& basis = u.basis();
  const int n = basis.n();
  const MappedNodes fwd = map_nodes(phi, basis.node_coords(), true);
  const CVec form = u.polynomial_form();
  const Eigen::Index N = basis.node_count();
  Eigen::VectorXd v(N);
  const double power = n / (2.0 * n + 2.0);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t lo, std::size_t hi) {
    MonomialEvaluator ev(n, basis.degree());
    for (std::size_t kk = lo; kk < hi; ++kk) {
      const auto k = static_cast<Eigen::Index>(kk);
      ev.set_point(fwd.points.col(k));
      cplx sum = 0.0;
      for (std::size_t i = 0; i < basis.monomials().size(); ++i) {
        sum += form[static_cast<Eigen::Index>(i)] * ev.value(basis.monomials()[i]);
      }
      v[k] = sum.real() * std::pow(fwd.jacobian[k], power);
    }
  });
  return v;
}

ShadowPoint shadow(const CenteringResult& centering, const Basis& basis) {
  const MappedNodes img = map_nodes(centering.phi, basis.node_coords(), false);
  ShadowPoint s;
  s.Theta = img.points * basis.weights().cast<cplx>();
  s.Theta_hat = unit_or_self(s.Theta);
  s.eps = centering.eps;
  return s;
}

ShadowPoint shadow(const Field& u, const CenteringOptions& options) {
  CenteringOptions opts = options;
  opts.compute_v = false;
  const CenteringResult c = find_centering(u, opts);
  if (!c.converged) {
    fail(ErrorKind::NoConvergence, "shadow: centering residual " + std::to_string(c.residual) + " after " +
                                       std::to_string(c.iterations) + " iterations");
  }
  return shadow(c, u.basis());
}

}  // namespace crflow
