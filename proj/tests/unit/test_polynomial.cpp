#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crflow/polynomial.hpp"

using namespace crflow;

namespace {

CVec random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVec x(n + 1);
  for (auto& c : x) c = cplx(g(rng), g(rng));
  return x / x.norm();
}

double lambda(int p, int q, int n) { return p * q + 0.5 * n * (p + q); }

}  // namespace

TEST(Polynomial, SubLaplacianOnHarmonics) {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 3; ++n) {
    const Polynomial x0 = Polynomial::coordinate(n, 0);
    const Polynomial xb1 = Polynomial::coordinate_conj(n, n);
    const Polynomial one = Polynomial::constant(n, 1.0);
    // |x_1|^2 - 1/(n+1) lies in H_{1,1}; x_1^2 conj(x_2) has bidegree (2,1).
    const Polynomial h11 = x0 * Polynomial::coordinate_conj(n, 0) - one * (1.0 / (n + 1));
    const Polynomial h21 = x0 * x0 * xb1;
    const Polynomial h30 = x0 * x0 * x0;
    for (int i = 0; i < 20; ++i) {
      const CVec x = random_unit(rng, n);
      EXPECT_NEAR(std::abs(h11.sub_laplacian()(x) + lambda(1, 1, n) * h11(x)), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(h21.sub_laplacian()(x) + lambda(2, 1, n) * h21(x)), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(h30.sub_laplacian()(x) + lambda(3, 0, n) * h30(x)), 0.0, 1e-13);
    }
  }
}

TEST(Polynomial, RealGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(22);
  const int n = 2;
  Polynomial f = Polynomial::coordinate(n, 0) * Polynomial::coordinate_conj(n, 1) * cplx(0.3, -0.7) +
                 Polynomial::coordinate(n, 2) * Polynomial::coordinate(n, 2) * 1.5;
  f = f.real_part();
  const CVec x = random_unit(rng, n) * 0.9;
  const Eigen::VectorXd grad = f.real_gradient(x);
  const double h = 1e-6;
  for (int j = 0; j <= n; ++j) {
    for (int part = 0; part < 2; ++part) {
      CVec xp = x;
      CVec xm = x;
      const cplx step = part == 0 ? cplx(h, 0.0) : cplx(0.0, h);
      xp[j] += step;
      xm[j] -= step;
      const double fd = (f(xp).real() - f(xm).real()) / (2.0 * h);
      EXPECT_NEAR(grad[2 * j + part], fd, 1e-8);
    }
  }
}

TEST(Polynomial, RealPartIsReal) {
  std::mt19937_64 rng(23);
  const int n = 1;
  const Polynomial p = (Polynomial::coordinate(n, 0) * Polynomial::coordinate(n, 1) * cplx(0.0, 2.0)).real_part();
  for (int i = 0; i < 10; ++i) {
    const CVec x = random_unit(rng, n);
    EXPECT_NEAR(p(x).imag(), 0.0, 1e-15);
    EXPECT_NEAR(p(x).real(), (cplx(0.0, 2.0) * x[0] * x[1]).real(), 1e-15);
  }
}

TEST(Polynomial, EvaluatorMatchesDirectPowers) {
  std::mt19937_64 rng(24);
  const int n = 2;
  MonomialEvaluator ev(n, 4);
  const CVec x = random_unit(rng, n);
  ev.set_point(x);
  for (const Monomial& m : reduced_monomials(n, 4)) {
    cplx direct = 1.0;
    for (int j = 0; j <= n; ++j) {
      direct *= std::pow(x[j], m.a[static_cast<size_t>(j)]) * std::pow(std::conj(x[j]), m.b[static_cast<size_t>(j)]);
    }
    EXPECT_NEAR(std::abs(ev.value(m) - direct), 0.0, 1e-14);
  }
}
