#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "crflow/constants.hpp"
#include "crflow/errors.hpp"
#include "crflow/spectral.hpp"

using namespace crflow;

namespace {

long binom(int a, int b) {
  if (b < 0 || b > a) return 0;
  long r = 1;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// dim H_{p,q}(C^{n+1}) for harmonic polynomials of bidegree (p, q).
long harmonic_dim(int p, int q, int n) {
  return binom(n + p, p) * binom(n + q, q) - binom(n + p - 1, p - 1) * binom(n + q - 1, q - 1);
}

class SpectralFixture : public ::testing::TestWithParam<std::pair<int, int>> {};

}  // namespace

TEST_P(SpectralFixture, GramIsIdentity) {
  const auto [n, J] = GetParam();
  const BasisPtr b = build_basis(n, J);
  const Eigen::MatrixXd& phi = b->synthesis_matrix();
  const Eigen::MatrixXd G = phi.transpose() * b->weights().asDiagonal() * phi / b->volume();
  EXPECT_LT((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_P(SpectralFixture, EigenvaluesFollowBidegrees) {
  const auto [n, J] = GetParam();
  const BasisPtr b = build_basis(n, J);
  std::map<std::pair<int, int>, long> count;
  for (Eigen::Index i = 0; i < b->size(); ++i) {
    const Bidegree d = b->bidegrees()[static_cast<std::size_t>(i)];
    EXPECT_NEAR(b->eigenvalues()[i], d.p * d.q + 0.5 * n * (d.p + d.q), 1e-12);
    ++count[{d.p, d.q}];
  }
  long total = 0;
  for (int k = 0; k <= J; ++k) {
    for (int p = k; 2 * p >= k; --p) {
      const int q = k - p;
      const long expect = harmonic_dim(p, q, n) * (p == q ? 1 : 2);
      EXPECT_EQ((count[{p, q}]), expect) << "bidegree " << p << "," << q;
      total += expect;
    }
  }
  EXPECT_EQ(b->size(), total);
}

TEST_P(SpectralFixture, WeightsSumToVolume) {
  const auto [n, J] = GetParam();
  const BasisPtr b = build_basis(n, J);
  EXPECT_NEAR(b->weights().sum() / sphere_volume(n), 1.0, 1e-12);
  EXPECT_NEAR(b->volume() / sphere_volume(n), 1.0, 1e-12);
}

TEST_P(SpectralFixture, CoordinateEigenfunctions) {
  const auto [n, J] = GetParam();
  const BasisPtr b = build_basis(n, J);
  for (int j = 0; j <= n; ++j) {
    const Field u = Field::from_polynomial(b, Polynomial::coordinate(n, j).real_part());
    const Field lu = sub_laplacian(u);
    EXPECT_LT((lu.values() + 0.5 * n * u.values()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST_P(SpectralFixture, TableAgreesWithPolynomialOperator) {
  const auto [n, J] = GetParam();
  const BasisPtr b = build_basis(n, J);
  for (Eigen::Index i = 0; i < b->size(); i += 7) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(b->size(), i);
    const Field direct = Field::from_polynomial(b, b->to_polynomial(e).sub_laplacian());
    EXPECT_LT((direct.coefficients() - b->apply_sub_laplacian(e)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Grids, SpectralFixture, ::testing::Values(std::pair{1, 4}, std::pair{1, 8}, std::pair{2, 3}));

TEST(Spectral, MomentsOfCoordinates) {
  // On the sphere, the mean of |x_1|^2 is 1/(n+1) and the mean of |x_1|^4 is 2/((n+1)(n+2)).
  for (const auto& [n, J] : {std::pair{1, 6}, std::pair{2, 4}}) {
    const BasisPtr b = build_basis(n, J);
    Eigen::VectorXd m2(b->node_count());
    Eigen::VectorXd m4(b->node_count());
    for (Eigen::Index k = 0; k < b->node_count(); ++k) {
      const double a = std::norm(b->node_coords()(0, k));
      m2[k] = a;
      m4[k] = a * a;
    }
    EXPECT_NEAR(b->integrate_values(m2) / b->volume(), 1.0 / (n + 1), 1e-13);
    EXPECT_NEAR(b->integrate_values(m4) / b->volume(), 2.0 / ((n + 1) * (n + 2)), 1e-13);
  }
}

TEST(Spectral, ParsevalAndRoundTrip) {
  const BasisPtr b = build_basis(1, 6);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  Eigen::VectorXd c(b->size());
  for (auto& v : c) v = g(rng);
  const Field u(b, c);
  EXPECT_LT((b->analyze(u.values()) - c).cwiseAbs().maxCoeff(), 1e-11);
  const double l2 = b->integrate_values(u.values().cwiseAbs2());
  EXPECT_NEAR(l2 / (b->volume() * c.squaredNorm()), 1.0, 1e-12);
}

TEST(Spectral, IntegrationByParts) {
  // Integral of Gamma(u, u) equals minus the integral of u Delta u.
  const BasisPtr b = build_basis(1, 6);
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g;
  Eigen::VectorXd c(b->size());
  for (auto& v : c) v = g(rng);
  const Field u(b, c);
  const double lhs = b->integrate_values(horizontal_grad_sq(u));
  const double rhs = -b->integrate_values(u.values().cwiseProduct(sub_laplacian(u).values()));
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-11);
}

TEST(Spectral, CarreDuChampOfCoordinate) {
  // Gamma(Re x_1, Re x_1) = (1 - |x_1|^2) / 4.
  const int n = 1;
  const BasisPtr b = build_basis(n, 4);
  const Field u = Field::from_polynomial(b, Polynomial::coordinate(n, 0).real_part());
  const Eigen::VectorXd gam = horizontal_grad_sq(u);
  for (Eigen::Index k = 0; k < b->node_count(); k += 13) {
    const CVec x = b->node_coords().col(k);
    // dU/dz_j = delta_{j0} / 2, A = x_0 / 2.
    const double expect = 0.25 - 0.25 * std::norm(x[0]);
    EXPECT_NEAR(gam[k], expect, 1e-13);
  }
}

TEST(Spectral, FieldPointEvaluationMatchesNodes) {
  const BasisPtr b = build_basis(2, 3);
  Polynomial p = (Polynomial::coordinate(2, 0) * Polynomial::coordinate_conj(2, 2) * cplx(1.0, 0.5)).real_part();
  const Field u = Field::from_polynomial(b, p);
  for (Eigen::Index k = 0; k < b->node_count(); k += 101) {
    EXPECT_NEAR(u.at(b->node(k)), u.values()[k], 1e-12);
    EXPECT_NEAR(u.at(b->node(k)), p(b->node(k)).real(), 1e-12);
  }
}

TEST(Spectral, RejectsBadArguments) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ConfigError;
  };
  EXPECT_EQ(kind_of([] { build_basis(0, 4); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { build_basis(1, 0); }), ErrorKind::InvalidArgument);
  BasisOptions tiny;
  tiny.memory_budget_bytes = 1024;
  EXPECT_EQ(kind_of([&] { build_basis(1, 4, tiny); }), ErrorKind::BudgetExceeded);
}
