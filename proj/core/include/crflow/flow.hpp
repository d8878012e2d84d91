#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "crflow/spectral.hpp"

namespace crflow {

/// R_theta0 = n(n+1)/2.
double standard_curvature(int n);
/// 2 + 2/n.
double critical_exponent(int n);

/// Webster curvature of u^{2/n} theta0 at the nodes. Throws NonPositiveFactor unless u > 0.
Eigen::VectorXd webster_curvature_values(const Field& u);
/// The same, projected into the basis.
Field webster_curvature(const Field& u);

struct EnergyReport {
  /// (2+2/n) Vol sum lambda c^2 + R0 Vol sum c^2.
  double spectral = 0.0;
  /// Integral of R_theta dV_theta.
  double curvature = 0.0;
  /// Integral of (2+2/n)|grad u|^2 + R0 u^2 on the grid.
  double gradient = 0.0;
  double max_discrepancy = 0.0;
};

double energy(const Field& u);
EnergyReport energy_report(const Field& u);
/// E(u) / (integral of f u^{2+2/n})^{n/(n+1)}.
double energy_f(const Field& u, const Field& f);
/// E(u) / integral of f u^{2+2/n}. Throws DegenerateDenominator when that integral is not positive.
double alpha(const Field& u, const Field& f);
/// (n/2)(alpha f - R_theta) u, projected.
Field flow_rhs(const Field& u, const Field& f);

struct DiagnosticsOptions {
  double concentration_radius = 0.5;
  /// Ball centers are grid nodes, strided down to at most this many.
  Eigen::Index max_centers = 5000;
};

struct DiagnosticsRecord {
  double E = 0.0;
  double E_f = 0.0;
  double alpha = 0.0;
  double F2 = 0.0;
  double G2 = 0.0;
  CVec P;
  std::optional<CVec> P_hat;
  /// (integral of x (alpha f - R) dV_theta, then its conjugate block).
  CVec b;
  CVec B;
  double kw_residual = 0.0;
  double max_u = 0.0;
  double mass_concentration = 0.0;
};

DiagnosticsRecord diagnostics(const Field& u, const Field& f, const DiagnosticsOptions& options = {});

/// Largest fraction of the total dV_theta mass inside a round geodesic ball.
double mass_concentration(const Basis& basis, const Eigen::VectorXd& u_values, const DiagnosticsOptions& options = {});

struct FlowState {
  double t = 0.0;
  Field u;
  double alpha = 0.0;
  double E_f = 0.0;
};

FlowState make_state(const Field& u0, const Field& f, double t = 0.0);

/// Rescales u so that the integral of u^{2+2/n} equals Vol.
Field renormalize(const Field& u);

struct StepOptions {
  double monotonicity_slack = 1e-10;
  double dt_min = 1e-7;
  /// When false, a gate violation throws StepRejected immediately instead of halving dt.
  bool retry = true;
};

struct StepOutcome {
  FlowState state;
  double dt_used = 0.0;
  int halvings = 0;
  /// E_f(after) - E_f(before).
  double energy_change = 0.0;
};

/// One RK4 step in coefficient space, then volume renormalization, gated on positivity
/// and on E_f not increasing beyond the slack. Throws PositivityLoss or StepRejected.
StepOutcome step(const FlowState& state, const Field& f, double dt, const StepOptions& options = {});

enum class TerminationStatus { Converged, Concentrated, TimeLimit, StepFailure };

std::string_view to_string(TerminationStatus status);

struct RunConfig {
  StepOptions step;
  DiagnosticsOptions diagnostics;
  double dt_init = 1e-3;
  double dt_max = 5e-2;
  double dt_growth = 1.2;
  double t_max = 10.0;
  double tol_converge = 1e-8;
  double blowup_factor = 50.0;
  double concentration_threshold = 0.9;
  int record_every = 10;
  bool enforce_beta = false;
  /// Compute the centering automorphism and shadow point at every record.
  bool track_shadow = true;
  /// Wall-clock cap in seconds; 0 disables it. Hitting it ends the run with TimeLimit.
  double wall_seconds = 0.0;
  long max_steps = 10'000'000;
};

struct TrajectoryRecord {
  double t = 0.0;
  long step = 0;
  DiagnosticsRecord diag;
  double abs_P = 0.0;
  double eps = std::numeric_limits<double>::quiet_NaN();
  CVec theta;
};

struct RunResult {
  TerminationStatus status = TerminationStatus::TimeLimit;
  FlowState final_state;
  std::vector<TrajectoryRecord> trajectory;
  std::string message;
  long steps = 0;
  long halvings = 0;
  double max_energy_increase = -std::numeric_limits<double>::infinity();
  /// Theta_hat of the final state, or P_hat when centering fails; empty after a step failure.
  std::optional<CVec> shadow_point;
};

/// beta = (1 + eps0) Y (min f)^{-n/(n+1)} with (1 - eps0)/(1 + eps0) = delta^{n/(n+1)} / 2^{1/(n+1)},
/// delta = max f / min f, and Y = R0 Vol^{1/(n+1)}. Throws BetaGateViolation when delta >= 2^{1/n}.
double beta_threshold(const Field& f);

using RecordObserver = std::function<void(const TrajectoryRecord&)>;

/// Integrates the flow from u0 (renormalized first). Throws BetaGateViolation when the gate is on
/// and E_f(u0) > beta.
RunResult run(const Field& u0, const Field& f, const RunConfig& config, const RecordObserver& observer = {});

}  // namespace crflow
