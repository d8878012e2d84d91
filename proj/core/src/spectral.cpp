#include "crflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "crflow/constants.hpp"
#include "crflow/errors.hpp"
#include "crflow/gauss.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Complex dimension of the bigraded harmonic space H_{p,q} on C^{n+1}.
long long harmonic_dimension(int p, int q, int n) {
  const long long full = binomial(p + n, n) * binomial(q + n, n);
  if (p == 0 || q == 0) return full;
  return full - binomial(p - 1 + n, n) * binomial(q - 1 + n, n);
}

struct Grid {
  CMat coords;  // (n+1) x N
  Eigen::VectorXd weights;
};

// Product rule for x_j = sqrt(s_j) e^{i theta_j}: equispaced angles and a conical
// Gauss-Jacobi rule on the simplex sum s_j = 1. dV_theta0 = 2^{1-n} ds dtheta here.
Grid hopf_grid(int n, int degree) {
  const int angles = degree + 1;
  const int radial = (degree / 2) / 2 + 1;

  std::vector<GaussRule> conical;
  for (int k = 1; k <= n; ++k) conical.push_back(gauss_jacobi_unit(radial, static_cast<double>(n - k)));

  long long count = 1;
  for (int j = 0; j <= n; ++j) count *= angles;
  for (int k = 0; k < n; ++k) count *= radial;

  Grid g;
  g.coords.resize(n + 1, count);
  g.weights.resize(count);

  const double dtheta = 2.0 * std::numbers::pi / angles;
  const double base = std::pow(2.0, 1 - n) * std::pow(dtheta, n + 1);

  std::vector<int> ti(static_cast<size_t>(n), 0);
  std::vector<int> ai(static_cast<size_t>(n + 1), 0);
  Eigen::Index col = 0;
  const long long simplex_count = count / static_cast<long long>(std::pow(angles, n + 1) + 0.5);
  for (long long s_idx = 0; s_idx < simplex_count; ++s_idx) {
    long long rem = s_idx;
    for (int k = 0; k < n; ++k) {
      ti[static_cast<size_t>(k)] = static_cast<int>(rem % radial);
      rem /= radial;
    }
    std::vector<double> s(static_cast<size_t>(n + 1));
    double remaining = 1.0;
    double w_simplex = 1.0;
    for (int k = 0; k < n; ++k) {
      const auto& rule = conical[static_cast<size_t>(k)];
      const double t = rule.nodes[static_cast<size_t>(ti[static_cast<size_t>(k)])];
      s[static_cast<size_t>(k)] = t * remaining;
      remaining *= 1.0 - t;
      w_simplex *= rule.weights[static_cast<size_t>(ti[static_cast<size_t>(k)])];
    }
    s[static_cast<size_t>(n)] = remaining;

    const long long angle_count = count / simplex_count;
    for (long long a_idx = 0; a_idx < angle_count; ++a_idx) {
      long long r2 = a_idx;
      for (int j = 0; j <= n; ++j) {
        ai[static_cast<size_t>(j)] = static_cast<int>(r2 % angles);
        r2 /= angles;
      }
      for (int j = 0; j <= n; ++j) {
        const double theta = dtheta * ai[static_cast<size_t>(j)];
        g.coords(j, col) = std::polar(std::sqrt(s[static_cast<size_t>(j)]), theta);
      }
      g.weights[col] = base * w_simplex;
      ++col;
    }
  }
  return g;
}

}  // namespace

double round_minus_reeb_eigenvalue(int p, int q, int n) {
  const double k = p + q;
  const double d = p - q;
  return k * (k + 2.0 * n) - d * d;
}

std::shared_ptr<const Basis> Basis::build(int n, int J, const BasisOptions& options) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "build_basis: n must be >= 1");
  if (J < 1) fail(ErrorKind::InvalidArgument, "build_basis: J must be >= 1");
  const int D = options.quadrature_degree > 0 ? options.quadrature_degree : 2 * J + 4;
  if (D < 2 * J) fail(ErrorKind::InvalidArgument, "build_basis: quadrature degree below 2J cannot orthonormalize");

  long long dim = 0;
  for (int k = 0; k <= J; ++k) {
    for (int p = 0; p <= k; ++p) dim += harmonic_dimension(p, k - p, n);
  }
  const int radial = (D / 2) / 2 + 1;
  double nodes = std::pow(D + 1.0, n + 1) * std::pow(static_cast<double>(radial), n);
  const double bytes = nodes * (static_cast<double>(dim) * 8.0 * 2.0 + (n + 1) * 16.0 + 8.0);
  if (bytes > static_cast<double>(options.memory_budget_bytes)) {
    fail(ErrorKind::BudgetExceeded, "build_basis: n=" + std::to_string(n) + ", J=" + std::to_string(J) + " needs about " +
                                        std::to_string(static_cast<long long>(bytes / 1048576.0)) + " MiB");
  }

  auto basis = std::shared_ptr<Basis>(new Basis());
  Basis& b = *basis;
  b.n_ = n;
  b.J_ = J;
  b.quad_degree_ = D;
  b.volume_ = sphere_volume(n);
  b.anchor_scale_ = round_minus_reeb_eigenvalue(1, 0, n) / (n / 2.0);

  Grid grid = hopf_grid(n, D);
  grid.weights *= b.volume_ / grid.weights.sum();
  b.node_coords_ = std::move(grid.coords);
  b.weights_ = std::move(grid.weights);
  const Eigen::Index N = b.node_coords_.cols();

  b.monomials_ = reduced_monomials(n, J);
  const auto M = static_cast<Eigen::Index>(b.monomials_.size());
  std::map<Monomial, Eigen::Index> position;
  for (Eigen::Index i = 0; i < M; ++i) position.emplace(b.monomials_[static_cast<size_t>(i)], i);

  // Monomial values at every node.
  CMat mono_values(N, M);
  parallel_for(static_cast<size_t>(N), [&](size_t lo, size_t hi) {
    MonomialEvaluator ev(n, J);
    for (size_t k = lo; k < hi; ++k) {
      ev.set_point(b.node_coords_.col(static_cast<Eigen::Index>(k)));
      for (Eigen::Index i = 0; i < M; ++i) mono_values(static_cast<Eigen::Index>(k), i) = ev.value(b.monomials_[static_cast<size_t>(i)]);
    }
  });

  b.phi_.resize(N, dim);
  b.monomial_coeffs_ = CMat::Zero(M, dim);
  b.eigenvalues_.resize(dim);
  b.bidegrees_.reserve(static_cast<size_t>(dim));

  const Eigen::VectorXd wn = b.weights_ / b.volume_;
  Eigen::Index filled = 0;

  auto project_out = [&](Eigen::MatrixXd& V, CMat& C) {
    if (filled == 0) return;
    const auto prev = b.phi_.leftCols(filled);
    const Eigen::MatrixXd coeff = prev.transpose() * (wn.asDiagonal() * V);
    V.noalias() -= prev * coeff;
    C.noalias() -= b.monomial_coeffs_.leftCols(filled) * coeff.cast<cplx>();
  };

  for (int k = 0; k <= J; ++k) {
    for (int p = k; 2 * p >= k; --p) {
      const int q = k - p;
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < M; ++i) {
        const Monomial& m = b.monomials_[static_cast<size_t>(i)];
        if (m.holomorphic_degree() == p && m.antiholomorphic_degree() == q) members.push_back(i);
      }
      const auto g = static_cast<Eigen::Index>(2 * members.size());
      Eigen::MatrixXd V(N, g);
      CMat C = CMat::Zero(M, g);
      for (size_t t = 0; t < members.size(); ++t) {
        const Eigen::Index i = members[t];
        const Eigen::Index ic = position.at(b.monomials_[static_cast<size_t>(i)].conjugate());
        const auto c0 = static_cast<Eigen::Index>(2 * t);
        V.col(c0) = mono_values.col(i).real();
        V.col(c0 + 1) = mono_values.col(i).imag();
        C(i, c0) += 0.5;
        C(ic, c0) += 0.5;
        C(i, c0 + 1) += cplx(0.0, -0.5);
        C(ic, c0 + 1) += cplx(0.0, 0.5);
      }
      project_out(V, C);
      project_out(V, C);

      // Pivoted modified Gram-Schmidt inside the group; dependent candidates fall below tol.
      Eigen::VectorXd norms(g);
      for (Eigen::Index c = 0; c < g; ++c) norms[c] = std::sqrt(V.col(c).cwiseAbs2().dot(wn));
      const double scale = norms.size() > 0 ? norms.maxCoeff() : 0.0;
      const long long expected = (p == q ? 1 : 2) * harmonic_dimension(p, q, n);
      std::vector<bool> used(static_cast<size_t>(g), false);
      long long accepted = 0;
      const Eigen::Index group_start = filled;
      while (true) {
        Eigen::Index best = -1;
        double best_norm = 0.0;
        for (Eigen::Index c = 0; c < g; ++c) {
          if (used[static_cast<size_t>(c)]) continue;
          const double nr = std::sqrt(V.col(c).cwiseAbs2().dot(wn));
          if (nr > best_norm) {
            best_norm = nr;
            best = c;
          }
        }
        if (best < 0 || best_norm <= 1e-8 * scale) break;
        used[static_cast<size_t>(best)] = true;
        Eigen::VectorXd v = V.col(best);
        Eigen::VectorXcd cv = C.col(best);
        for (int pass = 0; pass < 2; ++pass) {
          const double nr = std::sqrt(v.cwiseAbs2().dot(wn));
          v /= nr;
          cv /= nr;
          for (Eigen::Index j = group_start; j < filled; ++j) {
            const double dot = b.phi_.col(j).cwiseProduct(wn).dot(v);
            v -= dot * b.phi_.col(j);
            cv -= dot * b.monomial_coeffs_.col(j);
          }
        }
        const double nr = std::sqrt(v.cwiseAbs2().dot(wn));
        v /= nr;
        cv /= nr;
        if (filled >= dim) fail(ErrorKind::InvalidArgument, "build_basis: harmonic count exceeded");
        b.phi_.col(filled) = v;
        b.monomial_coeffs_.col(filled) = cv;
        b.eigenvalues_[filled] = round_minus_reeb_eigenvalue(p, q, n) / b.anchor_scale_;
        b.bidegrees_.push_back({p, q});
        // Remove the accepted direction from the remaining candidates.
        for (Eigen::Index c = 0; c < g; ++c) {
          if (used[static_cast<size_t>(c)]) continue;
          const double dot = v.cwiseProduct(wn).dot(V.col(c));
          V.col(c) -= dot * v;
          C.col(c) -= dot * cv;
        }
        ++filled;
        ++accepted;
      }
      if (accepted != expected) {
        fail(ErrorKind::InvalidArgument, "build_basis: bidegree (" + std::to_string(p) + "," + std::to_string(q) +
                                             ") produced " + std::to_string(accepted) + " functions, expected " +
                                             std::to_string(expected));
      }
    }
  }
  return basis;
}

Eigen::VectorXd Basis::synthesize(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != size()) fail(ErrorKind::InvalidArgument, "synthesize: coefficient count mismatch");
  return phi_ * coeffs;
}

Eigen::VectorXd Basis::analyze(const Eigen::VectorXd& node_values) const {
  if (node_values.size() != node_count()) fail(ErrorKind::InvalidArgument, "analyze: value count must equal node count");
  return phi_.transpose() * (weights_.cwiseProduct(node_values) / volume_);
}

double Basis::integrate_values(const Eigen::VectorXd& node_values) const {
  if (node_values.size() != node_count()) fail(ErrorKind::InvalidArgument, "integrate: value count must equal node count");
  return weights_.dot(node_values);
}

Eigen::VectorXd Basis::apply_sub_laplacian(const Eigen::VectorXd& coeffs) const {
  return -eigenvalues_.cwiseProduct(coeffs);
}

CVec Basis::polynomial_form(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != size()) fail(ErrorKind::InvalidArgument, "polynomial_form: coefficient count mismatch");
  return monomial_coeffs_ * coeffs.cast<cplx>();
}

double Basis::evaluate(const CVec& form, const SpherePoint& x) const {
  MonomialEvaluator ev(n_, J_);
  ev.set_point(x.coords());
  cplx sum = 0.0;
  for (size_t i = 0; i < monomials_.size(); ++i) sum += form[static_cast<Eigen::Index>(i)] * ev.value(monomials_[i]);
  return sum.real();
}

CMat Basis::holomorphic_gradient(const CVec& form) const {
  if (form.size() != static_cast<Eigen::Index>(monomials_.size())) {
    fail(ErrorKind::InvalidArgument, "holomorphic_gradient: polynomial form size mismatch");
  }
  const Eigen::Index N = node_count();
  CMat grad(n_ + 1, N);
  parallel_for(static_cast<size_t>(N), [&](size_t lo, size_t hi) {
    MonomialEvaluator ev(n_, J_);
    for (size_t k = lo; k < hi; ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      ev.set_point(node_coords_.col(col));
      for (int j = 0; j <= n_; ++j) {
        cplx d = 0.0;
        for (size_t i = 0; i < monomials_.size(); ++i) {
          const cplx c = form[static_cast<Eigen::Index>(i)];
          if (c != cplx(0.0)) d += c * ev.d_dz(monomials_[i], j);
        }
        grad(j, col) = d;
      }
    }
  });
  return grad;
}

Eigen::VectorXd Basis::carre_du_champ(const CMat& grad_u, const CMat& grad_v) const {
  const Eigen::Index N = node_count();
  Eigen::VectorXd out(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const cplx au = node_coords_.col(k).transpose() * grad_u.col(k);
    const cplx av = node_coords_.col(k).transpose() * grad_v.col(k);
    out[k] = grad_v.col(k).dot(grad_u.col(k)).real() - (au * std::conj(av)).real();
  }
  return out;
}

Eigen::VectorXd Basis::carre_du_champ(const CVec& form_u, const CVec& form_v) const {
  const CMat gu = holomorphic_gradient(form_u);
  if (&form_u == &form_v) return carre_du_champ(gu, gu);
  return carre_du_champ(gu, holomorphic_gradient(form_v));
}

Polynomial Basis::to_polynomial(const Eigen::VectorXd& coeffs) const {
  const CVec form = polynomial_form(coeffs);
  Polynomial p(n_);
  for (size_t i = 0; i < monomials_.size(); ++i) {
    const cplx c = form[static_cast<Eigen::Index>(i)];
    if (std::abs(c) > 1e-15) p.add_term(monomials_[i], c);
  }
  return p;
}

Basis Basis::with_eigenvalues(Eigen::VectorXd eigenvalues) const {
  if (eigenvalues.size() != size()) fail(ErrorKind::InvalidArgument, "with_eigenvalues: size mismatch");
  Basis copy = *this;
  copy.eigenvalues_ = std::move(eigenvalues);
  return copy;
}

Field::Field(BasisPtr basis, Eigen::VectorXd coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) fail(ErrorKind::InvalidArgument, "Field: null basis");
  values_ = basis_->synthesize(coeffs_);
}

Field Field::from_values(BasisPtr basis, const Eigen::VectorXd& node_values) {
  Eigen::VectorXd c = basis->analyze(node_values);
  return Field(std::move(basis), std::move(c));
}

Field Field::constant(BasisPtr basis, double value) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis->size());
  c[0] = value;
  return Field(std::move(basis), std::move(c));
}

Field Field::from_polynomial(BasisPtr basis, const Polynomial& poly) {
  const Eigen::Index N = basis->node_count();
  Eigen::VectorXd vals(N);
  for (Eigen::Index k = 0; k < N; ++k) vals[k] = poly(CVec(basis->node_coords().col(k))).real();
  return from_values(std::move(basis), vals);
}

double Field::at(const SpherePoint& x) const { return basis_->evaluate(polynomial_form(), x); }

Field Field::operator+(const Field& o) const { return Field(basis_, coeffs_ + o.coeffs_); }
Field Field::operator-(const Field& o) const { return Field(basis_, coeffs_ - o.coeffs_); }
Field Field::operator*(double s) const { return Field(basis_, coeffs_ * s); }

BasisPtr build_basis(int n, int J, const BasisOptions& options) { return Basis::build(n, J, options); }

Field analyze(const Eigen::VectorXd& node_values, const BasisPtr& basis) { return Field::from_values(basis, node_values); }

Field sub_laplacian(const Field& u) { return Field(u.basis_ptr(), u.basis().apply_sub_laplacian(u.coefficients())); }

Eigen::VectorXd horizontal_grad_sq(const Field& u) {
  const CVec form = u.polynomial_form();
  return u.basis().carre_du_champ(form, form);
}

double integrate(const Field& u) { return u.basis().integrate_values(u.values()); }

}  // namespace crflow
