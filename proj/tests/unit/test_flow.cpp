#include <gtest/gtest.h>

#include <cmath>

#include "crflow/errors.hpp"
#include "crflow/flow.hpp"
#include "crflow/normalization.hpp"
#include "crflow/scenario.hpp"

using namespace crflow;

namespace {

Polynomial gentle_perturbation(int n) {
  const Polynomial x0 = Polynomial::coordinate(n, 0);
  const Polynomial xn = Polynomial::coordinate(n, n);
  return (Polynomial::constant(n, 1.0) + (x0 * Polynomial::coordinate_conj(n, n)) * cplx(0.15, 0.05) + xn * 0.1)
      .real_part();
}

}  // namespace

TEST(Flow, StandardConstants) {
  EXPECT_DOUBLE_EQ(standard_curvature(1), 1.0);
  EXPECT_DOUBLE_EQ(standard_curvature(2), 3.0);
  EXPECT_DOUBLE_EQ(critical_exponent(1), 4.0);
  EXPECT_DOUBLE_EQ(critical_exponent(2), 3.0);
}

TEST(Flow, WebsterCurvatureMatchesPolynomialOperator) {
  for (const auto& [n, J] : {std::pair{1, 4}, std::pair{2, 3}}) {
    const BasisPtr b = build_basis(n, J);
    const Polynomial up = gentle_perturbation(n);
    const Field u = Field::from_polynomial(b, up);
    const Polynomial lap = up.sub_laplacian();
    const Eigen::VectorXd R = webster_curvature_values(u);
    const double a = 2.0 + 2.0 / n;
    for (Eigen::Index k = 0; k < b->node_count(); k += 17) {
      const SpherePoint x = b->node(k);
      const double uv = up(x).real();
      const double expect = std::pow(uv, -(1.0 + 2.0 / n)) * (-a * lap(x).real() + standard_curvature(n) * uv);
      EXPECT_NEAR(R[k], expect, 1e-11);
    }
  }
}

TEST(Flow, ConstantIsStationary) {
  const BasisPtr b = build_basis(2, 3);
  const Field one = Field::constant(b, 1.0);
  const Field f = Field::constant(b, standard_curvature(2));
  EXPECT_LT((webster_curvature_values(one).array() - 3.0).abs().maxCoeff(), 1e-13);
  EXPECT_LT(flow_rhs(one, f).coefficients().cwiseAbs().maxCoeff(), 1e-12);
  const DiagnosticsRecord d = diagnostics(one, f);
  EXPECT_LT(d.F2 / (9.0 * b->volume()), 1e-24);
  EXPECT_NEAR(d.alpha, 1.0, 1e-13);
}

TEST(Flow, EnergyFormsAgree) {
  const BasisPtr b = build_basis(1, 6);
  const Field u = Field::from_polynomial(b, gentle_perturbation(1));
  const EnergyReport r = energy_report(u);
  EXPECT_NEAR(r.spectral / r.gradient, 1.0, 1e-11);
  EXPECT_NEAR(r.spectral / r.curvature, 1.0, 1e-10);
  EXPECT_NEAR(energy(u), r.spectral, 1e-10 * r.spectral);
}

TEST(Flow, EnergyFIsScaleInvariant) {
  const BasisPtr b = build_basis(1, 6);
  const Field u = Field::from_polynomial(b, gentle_perturbation(1));
  const Field f = Field::from_polynomial(b, preset_f("two-peak", 1));
  EXPECT_NEAR(energy_f(u * 3.7, f) / energy_f(u, f), 1.0, 1e-13);
  EXPECT_NEAR(energy_f(renormalize(u), f) / energy_f(u, f), 1.0, 1e-13);
  const Field r = renormalize(u);
  EXPECT_NEAR(b->integrate_values(r.values().array().pow(4.0).matrix()) / b->volume(), 1.0, 1e-13);
}

TEST(Flow, YamabeInvariantIsMinimumForConstantF) {
  // Y(S^{2n+1}) = R0 Vol^{1/(n+1)} bounds E_f from below when f = 1.
  const BasisPtr b = build_basis(1, 6);
  const Field f = Field::constant(b, 1.0);
  const double Y = standard_curvature(1) * std::sqrt(b->volume());
  EXPECT_NEAR(energy_f(Field::constant(b, 2.0), f), Y, 1e-12 * Y);
  EXPECT_GT(energy_f(Field::from_polynomial(b, gentle_perturbation(1)), f), Y);
}

TEST(Flow, StepsDecreaseEnergy) {
  const BasisPtr b = build_basis(1, 6);
  const Field f = Field::from_polynomial(b, preset_f("two-peak", 1));
  FlowState s = make_state(Field::from_polynomial(b, gentle_perturbation(1)), f);
  for (int i = 0; i < 30; ++i) {
    const StepOutcome out = step(s, f, 0.01);
    EXPECT_LE(out.energy_change, 1e-10);
    EXPECT_NEAR(out.state.E_f - s.E_f, out.energy_change, 1e-12);
    s = out.state;
  }
}

TEST(Flow, StrictGateRejectsLargeSteps) {
  const BasisPtr b = build_basis(1, 6);
  const Field f = Field::from_polynomial(b, preset_f("two-peak", 1));
  const FlowState s = make_state(random_perturbation(b, 0.3, 3, 4), f);
  StepOptions strict;
  strict.monotonicity_slack = 0.0;
  strict.retry = false;
  try {
    step(s, f, 2.0, strict);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::StepRejected || e.kind() == ErrorKind::PositivityLoss);
  }
}

TEST(Flow, ConstantCurvatureRunConverges) {
  const BasisPtr b = build_basis(1, 6);
  const Field f = Field::constant(b, 1.0);
  RunConfig cfg;
  cfg.dt_init = 0.01;
  cfg.t_max = 60.0;
  const RunResult r = run(random_perturbation(b, 0.2, 3, 9), f, cfg);
  ASSERT_EQ(r.status, TerminationStatus::Converged) << r.message;
  EXPECT_LT(r.trajectory.back().diag.F2, 1e-8);
  EXPECT_LE(r.max_energy_increase, 1e-10);
  EXPECT_LT(r.trajectory.back().diag.kw_residual, 1e-6 * b->volume());
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
    EXPECT_LE(r.trajectory[i].diag.E_f, r.trajectory[i - 1].diag.E_f + 1e-10);
  }
}

TEST(Flow, ConformalInvarianceOfEnergy) {
  const BasisPtr b = build_basis(1, 8);
  const Field u = Field::from_polynomial(b, gentle_perturbation(1));
  CVec target(2);
  target << cplx(0.3, 0.4), cplx(0.0, std::sqrt(0.75));
  const CRAutomorphism phi(pole_rotation_to(SpherePoint::normalized(target)), HeisenbergPoint{CVec::Constant(1, 0.2), 0.1}, 1.25);
  const Field v = Field::from_values(b, normalized_factor_values(u, phi));
  EXPECT_NEAR(energy(v) / energy(u), 1.0, 1e-4);
}

TEST(Flow, BetaThreshold) {
  const int n = 1;
  const BasisPtr b = build_basis(n, 6);
  const Field f = Field::from_polynomial(b, preset_f("two-peak", n));
  const double delta = f.max_value() / f.min_value();
  const double s = std::pow(delta, 0.5) / std::pow(2.0, 0.5);
  const double eps0 = (1.0 - s) / (1.0 + s);
  const double expect = (1.0 + eps0) * std::sqrt(b->volume()) / std::sqrt(f.min_value());
  EXPECT_NEAR(beta_threshold(f), expect, 1e-12 * expect);

  const Field steep = Field::from_polynomial(
      b, (Polynomial::constant(n, 1.0) + Polynomial::coordinate(n, 1).real_part() * 0.5).real_part());
  try {
    beta_threshold(steep);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BetaGateViolation);
  }
}

TEST(Flow, DiagnosticsOfStandardState) {
  const BasisPtr b = build_basis(1, 8);
  const Field f = Field::constant(b, 1.0);
  const Field u = renormalize(Field::constant(b, 1.0));
  const DiagnosticsRecord d = diagnostics(u, f);
  EXPECT_LT(d.kw_residual, 1e-12);
  EXPECT_LT(d.mass_concentration, 0.2);
  EXPECT_NEAR(d.max_u, 1.0, 1e-12);
}
