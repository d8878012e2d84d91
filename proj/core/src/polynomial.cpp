#include "crflow/polynomial.hpp"

#include <algorithm>
#include <numeric>

#include "crflow/errors.hpp"

namespace crflow {

int Monomial::holomorphic_degree() const { return std::accumulate(a.begin(), a.end(), 0); }
int Monomial::antiholomorphic_degree() const { return std::accumulate(b.begin(), b.end(), 0); }

Polynomial Polynomial::constant(int n, cplx c) {
  Polynomial p(n);
  p.add_term({std::vector<int>(n + 1, 0), std::vector<int>(n + 1, 0)}, c);
  return p;
}

Polynomial Polynomial::coordinate(int n, int j) {
  Monomial m{std::vector<int>(n + 1, 0), std::vector<int>(n + 1, 0)};
  m.a.at(static_cast<size_t>(j)) = 1;
  return monomial(n, m);
}

Polynomial Polynomial::coordinate_conj(int n, int j) {
  Monomial m{std::vector<int>(n + 1, 0), std::vector<int>(n + 1, 0)};
  m.b.at(static_cast<size_t>(j)) = 1;
  return monomial(n, m);
}

Polynomial Polynomial::monomial(int n, Monomial m, cplx c) {
  if (static_cast<int>(m.a.size()) != n + 1 || static_cast<int>(m.b.size()) != n + 1) {
    fail(ErrorKind::InvalidArgument, "monomial exponent length must be n+1");
  }
  Polynomial p(n);
  p.add_term(m, c);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

void Polynomial::add_term(const Monomial& m, cplx c) {
  if (c == cplx(0.0, 0.0)) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
  }
}

Polynomial Polynomial::conj() const {
  Polynomial out(n_);
  for (const auto& [m, c] : terms_) out.add_term(m.conjugate(), std::conj(c));
  return out;
}

Polynomial Polynomial::real_part() const { return (*this + conj()) * cplx(0.5, 0.0); }

Polynomial Polynomial::d_dz(int j) const {
  Polynomial out(n_);
  for (const auto& [m, c] : terms_) {
    const int e = m.a[static_cast<size_t>(j)];
    if (e == 0) continue;
    Monomial d = m;
    d.a[static_cast<size_t>(j)] -= 1;
    out.add_term(d, c * static_cast<double>(e));
  }
  return out;
}

Polynomial Polynomial::d_dzbar(int j) const {
  Polynomial out(n_);
  for (const auto& [m, c] : terms_) {
    const int e = m.b[static_cast<size_t>(j)];
    if (e == 0) continue;
    Monomial d = m;
    d.b[static_cast<size_t>(j)] -= 1;
    out.add_term(d, c * static_cast<double>(e));
  }
  return out;
}

cplx Polynomial::operator()(const CVec& x) const {
  cplx sum = 0.0;
  for (const auto& [m, c] : terms_) {
    cplx v = c;
    for (int j = 0; j <= n_; ++j) {
      const auto sj = static_cast<size_t>(j);
      if (m.a[sj] > 0) v *= std::pow(x[j], m.a[sj]);
      if (m.b[sj] > 0) v *= std::pow(std::conj(x[j]), m.b[sj]);
    }
    sum += v;
  }
  return sum;
}

Eigen::VectorXd Polynomial::real_gradient(const CVec& x) const {
  Eigen::VectorXd g(2 * (n_ + 1));
  for (int j = 0; j <= n_; ++j) {
    const cplx dz = d_dz(j)(x);
    const cplx dzb = d_dzbar(j)(x);
    g[2 * j] = (dz + dzb).real();
    g[2 * j + 1] = (cplx(0.0, 1.0) * (dz - dzb)).real();
  }
  return g;
}

Eigen::MatrixXd Polynomial::real_hessian(const CVec& x) const {
  const int dim = 2 * (n_ + 1);
  Eigen::MatrixXd H(dim, dim);
  const cplx I(0.0, 1.0);
  for (int j = 0; j <= n_; ++j) {
    const Polynomial dre = d_dz(j) + d_dzbar(j);
    const Polynomial dim_ = (d_dz(j) - d_dzbar(j)) * I;
    for (int k = 0; k <= n_; ++k) {
      H(2 * j, 2 * k) = (dre.d_dz(k) + dre.d_dzbar(k))(x).real();
      H(2 * j, 2 * k + 1) = ((dre.d_dz(k) - dre.d_dzbar(k)) * I)(x).real();
      H(2 * j + 1, 2 * k) = (dim_.d_dz(k) + dim_.d_dzbar(k))(x).real();
      H(2 * j + 1, 2 * k + 1) = ((dim_.d_dz(k) - dim_.d_dzbar(k)) * I)(x).real();
    }
  }
  return 0.5 * (H + H.transpose());
}

Polynomial Polynomial::sub_laplacian() const {
  Polynomial out(n_);
  for (const auto& [m, c] : terms_) {
    const int p = m.holomorphic_degree();
    const int q = m.antiholomorphic_degree();
    const int k = p + q;
    // Euclidean Laplacian 4 sum d_z d_zbar of a homogeneous piece, then the radial correction.
    for (int j = 0; j <= n_; ++j) {
      const auto sj = static_cast<size_t>(j);
      if (m.a[sj] > 0 && m.b[sj] > 0) {
        Monomial d = m;
        d.a[sj] -= 1;
        d.b[sj] -= 1;
        out.add_term(d, c * static_cast<double>(m.a[sj] * m.b[sj]));  // 4 a_j b_j / 4
      }
    }
    const double diag = (-static_cast<double>(k) * (k + 2 * n_) + static_cast<double>((p - q) * (p - q))) / 4.0;
    out.add_term(m, c * diag);
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * cplx(-1.0, 0.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out(n_);
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : o.terms_) {
      Monomial m = m1;
      for (size_t j = 0; j < m.a.size(); ++j) {
        m.a[j] += m2.a[j];
        m.b[j] += m2.b[j];
      }
      out.add_term(m, c1 * c2);
    }
  }
  return out;
}

Polynomial Polynomial::operator*(cplx s) const {
  Polynomial out(n_);
  for (const auto& [m, c] : terms_) out.add_term(m, c * s);
  return out;
}

namespace {

void compositions(int parts, int total, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
  if (pos == parts - 1) {
    cur[static_cast<size_t>(pos)] = total;
    out.push_back(cur);
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur[static_cast<size_t>(pos)] = v;
    compositions(parts, total - v, cur, pos + 1, out);
  }
}

std::vector<std::vector<int>> all_compositions(int parts, int total) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<size_t>(parts), 0);
  compositions(parts, total, cur, 0, out);
  return out;
}

}  // namespace

std::vector<Monomial> reduced_monomials(int n, int max_degree) {
  std::vector<Monomial> out;
  const auto last = static_cast<size_t>(n);
  for (int k = 0; k <= max_degree; ++k) {
    for (int p = k; p >= 0; --p) {
      const int q = k - p;
      for (const auto& a : all_compositions(n + 1, p)) {
        for (const auto& b : all_compositions(n + 1, q)) {
          if (a[last] > 0 && b[last] > 0) continue;
          out.push_back({a, b});
        }
      }
    }
  }
  return out;
}

MonomialEvaluator::MonomialEvaluator(int n, int max_degree)
    : n_(n),
      max_degree_(max_degree),
      zpow_(static_cast<size_t>((n + 1) * (max_degree + 1))),
      zbpow_(static_cast<size_t>((n + 1) * (max_degree + 1))) {}

void MonomialEvaluator::set_point(const CVec& x) {
  for (int j = 0; j <= n_; ++j) {
    cplx p = 1.0;
    cplx pb = 1.0;
    const cplx xc = std::conj(x[j]);
    for (int e = 0; e <= max_degree_; ++e) {
      zpow_[static_cast<size_t>(j * (max_degree_ + 1) + e)] = p;
      zbpow_[static_cast<size_t>(j * (max_degree_ + 1) + e)] = pb;
      p *= x[j];
      pb *= xc;
    }
  }
}

cplx MonomialEvaluator::value(const Monomial& m) const {
  cplx v = 1.0;
  for (int j = 0; j <= n_; ++j) {
    const auto sj = static_cast<size_t>(j);
    v *= zp(j, m.a[sj]) * zbp(j, m.b[sj]);
  }
  return v;
}

cplx MonomialEvaluator::d_dz(const Monomial& m, int j) const {
  const auto sj = static_cast<size_t>(j);
  if (m.a[sj] == 0) return 0.0;
  cplx v = static_cast<double>(m.a[sj]);
  for (int i = 0; i <= n_; ++i) {
    const auto si = static_cast<size_t>(i);
    const int ea = i == j ? m.a[si] - 1 : m.a[si];
    v *= zp(i, ea) * zbp(i, m.b[si]);
  }
  return v;
}

}  // namespace crflow
