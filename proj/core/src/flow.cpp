#include "crflow/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "crflow/errors.hpp"
#include "crflow/normalization.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

namespace {

Eigen::VectorXd powered(const Eigen::VectorXd& u, double p) { return u.array().pow(p).matrix(); }

void require_positive(const Eigen::VectorXd& u, ErrorKind kind, const char* where) {
  const double m = u.minCoeff();
  if (!(m > 0.0)) fail(kind, std::string(where) + ": conformal factor not positive (min " + std::to_string(m) + ")");
}

double spectral_energy(const Basis& b, const Eigen::VectorXd& c) {
  const double k = critical_exponent(b.n());
  const double R0 = standard_curvature(b.n());
  return b.volume() * ((k * b.eigenvalues().array() + R0) * c.array().square()).sum();
}

Eigen::VectorXd curvature_from(const Basis& b, const Eigen::VectorXd& c, const Eigen::VectorXd& u) {
  const int n = b.n();
  const Eigen::VectorXd lap = b.synthesize(b.apply_sub_laplacian(c));
  const Eigen::VectorXd lhs = -critical_exponent(n) * lap + standard_curvature(n) * u;
  return lhs.cwiseProduct(powered(u, -(1.0 + 2.0 / n)));
}

struct RhsEval {
  Eigen::VectorXd coeffs;
  bool positive = true;
};

// (n/2)(alpha f - R) u in coefficients, with the positivity of u reported instead of thrown.
RhsEval rhs_coeffs(const Basis& b, const Eigen::VectorXd& c, const Eigen::VectorXd& f_values) {
  const Eigen::VectorXd u = b.synthesize(c);
  if (!(u.minCoeff() > 0.0)) return {Eigen::VectorXd(), false};
  const int n = b.n();
  const Eigen::VectorXd R = curvature_from(b, c, u);
  const double denom = b.weights().dot(f_values.cwiseProduct(powered(u, critical_exponent(n))));
  const double a = spectral_energy(b, c) / denom;
  const Eigen::VectorXd g = (0.5 * n) * (a * f_values - R).cwiseProduct(u);
  return {b.analyze(g), true};
}

double energy_f_coeffs(const Basis& b, const Eigen::VectorXd& c, const Eigen::VectorXd& u, const Eigen::VectorXd& f_values) {
  const int n = b.n();
  const double denom = b.weights().dot(f_values.cwiseProduct(powered(u, critical_exponent(n))));
  return spectral_energy(b, c) / std::pow(denom, n / (n + 1.0));
}

}  // namespace

double standard_curvature(int n) { return n * (n + 1) / 2.0; }

double critical_exponent(int n) { return 2.0 + 2.0 / n; }

Eigen::VectorXd webster_curvature_values(const Field& u) {
  require_positive(u.values(), ErrorKind::NonPositiveFactor, "webster_curvature");
  return curvature_from(u.basis(), u.coefficients(), u.values());
}

Field webster_curvature(const Field& u) { return Field::from_values(u.basis_ptr(), webster_curvature_values(u)); }

double energy(const Field& u) { return spectral_energy(u.basis(), u.coefficients()); }

EnergyReport energy_report(const Field& u) {
  const Basis& b = u.basis();
  const int n = b.n();
  EnergyReport r;
  r.spectral = energy(u);
  const Eigen::VectorXd R = webster_curvature_values(u);
  r.curvature = b.integrate_values(R.cwiseProduct(powered(u.values(), critical_exponent(n))));
  const Eigen::VectorXd grad = horizontal_grad_sq(u);
  r.gradient = b.integrate_values(critical_exponent(n) * grad + standard_curvature(n) * u.values().cwiseAbs2());
  r.max_discrepancy = std::max({std::abs(r.spectral - r.curvature), std::abs(r.spectral - r.gradient),
                                std::abs(r.curvature - r.gradient)});
  return r;
}

double alpha(const Field& u, const Field& f) {
  require_positive(u.values(), ErrorKind::NonPositiveFactor, "alpha");
  const Basis& b = u.basis();
  const double denom = b.integrate_values(f.values().cwiseProduct(powered(u.values(), critical_exponent(b.n()))));
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    fail(ErrorKind::DegenerateDenominator, "alpha: integral of f u^{2+2/n} is " + std::to_string(denom));
  }
  return energy(u) / denom;
}

double energy_f(const Field& u, const Field& f) {
  const Basis& b = u.basis();
  const double denom = b.integrate_values(f.values().cwiseProduct(powered(u.values(), critical_exponent(b.n()))));
  if (!(denom > 0.0)) fail(ErrorKind::DegenerateDenominator, "energy_f: integral of f u^{2+2/n} is not positive");
  return energy(u) / std::pow(denom, b.n() / (b.n() + 1.0));
}

Field flow_rhs(const Field& u, const Field& f) {
  require_positive(u.values(), ErrorKind::NonPositiveFactor, "flow_rhs");
  const double a = alpha(u, f);
  const Eigen::VectorXd R = webster_curvature_values(u);
  const Eigen::VectorXd g = (0.5 * u.basis().n()) * (a * f.values() - R).cwiseProduct(u.values());
  return Field::from_values(u.basis_ptr(), g);
}

double mass_concentration(const Basis& basis, const Eigen::VectorXd& u_values, const DiagnosticsOptions& options) {
  const Eigen::VectorXd mass = basis.weights().cwiseProduct(powered(u_values, critical_exponent(basis.n())));
  const double total = mass.sum();
  const Eigen::Index N = basis.node_count();
  const Eigen::Index stride = std::max<Eigen::Index>(1, (N + options.max_centers - 1) / options.max_centers);
  const Eigen::Index centers = (N + stride - 1) / stride;
  const double cos_radius = std::cos(options.concentration_radius);
  const CMat& X = basis.node_coords();
  std::vector<double> inside(static_cast<std::size_t>(centers), 0.0);
  parallel_for(static_cast<std::size_t>(centers), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      const auto center = static_cast<Eigen::Index>(c) * stride;
      double acc = 0.0;
      for (Eigen::Index k = 0; k < N; ++k) {
        if (X.col(center).dot(X.col(k)).real() >= cos_radius) acc += mass[k];
      }
      inside[c] = acc;
    }
  });
  double best = 0.0;
  for (double v : inside) best = std::max(best, v);
  return best / total;
}

DiagnosticsRecord diagnostics(const Field& u, const Field& f, const DiagnosticsOptions& options) {
  const Basis& b = u.basis();
  const int n = b.n();
  const Eigen::VectorXd& uv = u.values();
  require_positive(uv, ErrorKind::NonPositiveFactor, "diagnostics");
  const Eigen::VectorXd up = powered(uv, critical_exponent(n));
  const Eigen::VectorXd dvol = b.weights().cwiseProduct(up);

  DiagnosticsRecord d;
  d.E = energy(u);
  d.alpha = alpha(u, f);
  d.E_f = energy_f(u, f);
  const Eigen::VectorXd R = webster_curvature_values(u);
  const Eigen::VectorXd w = R - d.alpha * f.values();
  d.F2 = dvol.dot(w.cwiseAbs2());

  const Field W = Field::from_values(u.basis_ptr(), w);
  d.G2 = b.weights().dot(uv.cwiseAbs2().cwiseProduct(horizontal_grad_sq(W)));

  const CMat& X = b.node_coords();
  d.P = X * dvol.cast<cplx>();
  if (d.P.norm() > 1e-12) d.P_hat = d.P / d.P.norm();

  const CVec first = X * dvol.cwiseProduct(-w).cast<cplx>();
  d.b.resize(2 * (n + 1));
  d.b.head(n + 1) = first;
  d.b.tail(n + 1) = first.conjugate();
  d.B = std::sqrt(n + 1.0) * d.b;

  const Field Rf = Field::from_values(u.basis_ptr(), R);
  const CMat grad = b.holomorphic_gradient(Rf.polynomial_form());
  const cplx half_i(0.0, -0.5);  // 1 / (2i)
  double kw_sq = 0.0;
  for (int j = 0; j <= n; ++j) {
    cplx kw = 0.0;
    for (Eigen::Index k = 0; k < b.node_count(); ++k) {
      const cplx a_r = X.col(k).transpose() * grad.col(k);
      const cplx core = std::conj(grad(j, k)) - X(j, k) * std::conj(a_r);
      kw += dvol[k] * cplx((0.5 * core).real(), (half_i * core).real());
    }
    kw_sq += 2.0 * std::norm(kw);
  }
  d.kw_residual = std::sqrt(kw_sq);
  d.max_u = uv.maxCoeff();
  d.mass_concentration = mass_concentration(b, uv, options);
  return d;
}

Field renormalize(const Field& u) {
  const Basis& b = u.basis();
  require_positive(u.values(), ErrorKind::NonPositiveFactor, "renormalize");
  const double p = critical_exponent(b.n());
  const double sigma = std::pow(b.volume() / b.integrate_values(powered(u.values(), p)), 1.0 / p);
  return u * sigma;
}

FlowState make_state(const Field& u0, const Field& f, double t) {
  FlowState s{t, u0, alpha(u0, f), energy_f(u0, f)};
  return s;
}

StepOutcome step(const FlowState& state, const Field& f, double dt, const StepOptions& options) {
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "step: dt must be positive");
  const Basis& b = state.u.basis();
  const Eigen::VectorXd& c0 = state.u.coefficients();
  const Eigen::VectorXd& fv = f.values();
  const double p = critical_exponent(b.n());
  const double e_before = energy_f_coeffs(b, c0, state.u.values(), fv);

  int halvings = 0;
  double h = dt;
  while (true) {
    bool positive = true;
    double e_after = 0.0;
    Eigen::VectorXd c1;
    Eigen::VectorXd u1;
    const RhsEval k1 = rhs_coeffs(b, c0, fv);
    positive = k1.positive;
    RhsEval k2, k3, k4;
    if (positive) positive = (k2 = rhs_coeffs(b, c0 + 0.5 * h * k1.coeffs, fv)).positive;
    if (positive) positive = (k3 = rhs_coeffs(b, c0 + 0.5 * h * k2.coeffs, fv)).positive;
    if (positive) positive = (k4 = rhs_coeffs(b, c0 + h * k3.coeffs, fv)).positive;
    if (positive) {
      c1 = c0 + (h / 6.0) * (k1.coeffs + 2.0 * k2.coeffs + 2.0 * k3.coeffs + k4.coeffs);
      u1 = b.synthesize(c1);
      positive = u1.minCoeff() > 0.0;
    }
    if (positive) {
      const double sigma = std::pow(b.volume() / b.integrate_values(powered(u1, p)), 1.0 / p);
      c1 *= sigma;
      u1 *= sigma;
      e_after = energy_f_coeffs(b, c1, u1, fv);
      if (e_after - e_before <= options.monotonicity_slack) {
        Field u(state.u.basis_ptr(), c1);
        StepOutcome out{FlowState{state.t + h, u, 0.0, e_after}, h, halvings, e_after - e_before};
        out.state.alpha = alpha(out.state.u, f);
        return out;
      }
    }
    const bool can_halve = options.retry && h / 2.0 >= options.dt_min;
    if (!can_halve) {
      if (!positive) {
        fail(ErrorKind::PositivityLoss, "step: conformal factor lost positivity at dt=" + std::to_string(h));
      }
      fail(ErrorKind::StepRejected, "step: E_f increased by " + std::to_string(e_after - e_before) + " at dt=" +
                                        std::to_string(h));
    }
    h /= 2.0;
    ++halvings;
  }
}

std::string_view to_string(TerminationStatus status) {
  switch (status) {
    case TerminationStatus::Converged: return "Converged";
    case TerminationStatus::Concentrated: return "Concentrated";
    case TerminationStatus::TimeLimit: return "TimeLimit";
    case TerminationStatus::StepFailure: return "StepFailure";
  }
  return "?";
}

double beta_threshold(const Field& f) {
  const Basis& b = f.basis();
  const int n = b.n();
  const double fmin = f.min_value();
  const double fmax = f.max_value();
  if (!(fmin > 0.0)) fail(ErrorKind::NonPositiveMin, "beta_threshold: min f must be positive");
  const double delta = fmax / fmin;
  if (!(delta < std::pow(2.0, 1.0 / n))) {
    fail(ErrorKind::BetaGateViolation, "beta_threshold: max f / min f = " + std::to_string(delta) +
                                           " violates the simple bubble condition");
  }
  const double rho = std::pow(delta, n / (n + 1.0)) / std::pow(2.0, 1.0 / (n + 1.0));
  const double eps0 = (1.0 - rho) / (1.0 + rho);
  const double Y = standard_curvature(n) * std::pow(b.volume(), 1.0 / (n + 1.0));
  return (1.0 + eps0) * Y * std::pow(fmin, -n / (n + 1.0));
}

RunResult run(const Field& u0, const Field& f, const RunConfig& config, const RecordObserver& observer) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  if (!(f.min_value() > 0.0)) fail(ErrorKind::InvalidArgument, "run: f must be positive on the grid");
  require_positive(u0.values(), ErrorKind::NonPositiveFactor, "run");

  FlowState state = make_state(renormalize(u0), f);
  if (config.enforce_beta) {
    const double beta = beta_threshold(f);
    if (state.E_f > beta) {
      fail(ErrorKind::BetaGateViolation,
           "run: E_f(u0) = " + std::to_string(state.E_f) + " exceeds beta = " + std::to_string(beta));
    }
  }

  RunResult result;
  CenteringOptions centering;
  centering.compute_v = false;

  auto record = [&](long step_index) {
    TrajectoryRecord rec;
    rec.t = state.t;
    rec.step = step_index;
    rec.diag = diagnostics(state.u, f, config.diagnostics);
    rec.abs_P = rec.diag.P.norm();
    const int n = state.u.basis().n();
    rec.theta = CVec::Constant(n + 1, cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
    if (config.track_shadow) {
      const CenteringResult c = find_centering(state.u, centering);
      const ShadowPoint s = shadow(c, state.u.basis());
      rec.eps = s.eps;
      rec.theta = s.Theta;
    }
    result.trajectory.push_back(rec);
    if (observer) observer(rec);
    return rec;
  };

  auto finish = [&](TerminationStatus status, std::string message, long steps, bool recorded) {
    if (!recorded) record(steps);
    result.status = status;
    result.message = std::move(message);
    result.final_state = state;
    result.steps = steps;
    if (status != TerminationStatus::StepFailure) {
      try {
        const ShadowPoint s = shadow(state.u, centering);
        result.shadow_point = s.Theta_hat;
      } catch (const Error&) {
        const auto& last = result.trajectory.back().diag;
        if (last.P_hat) result.shadow_point = *last.P_hat;
      }
    }
    return result;
  };

  auto classify = [&](const TrajectoryRecord& rec) -> std::optional<TerminationStatus> {
    if (rec.diag.F2 < config.tol_converge) return TerminationStatus::Converged;
    if (rec.diag.mass_concentration > config.concentration_threshold && rec.diag.max_u > config.blowup_factor) {
      return TerminationStatus::Concentrated;
    }
    return std::nullopt;
  };

  {
    const TrajectoryRecord first = record(0);
    if (auto s = classify(first)) return finish(*s, "initial state", 0, true);
  }

  double dt = config.dt_init;
  long steps = 0;
  while (true) {
    if (state.t >= config.t_max - 1e-15) return finish(TerminationStatus::TimeLimit, "t_max reached", steps, false);
    if (steps >= config.max_steps) return finish(TerminationStatus::TimeLimit, "step cap reached", steps, false);
    if (config.wall_seconds > 0.0 &&
        std::chrono::duration<double>(Clock::now() - started).count() > config.wall_seconds) {
      return finish(TerminationStatus::TimeLimit, "wall-clock cap reached", steps, false);
    }
    const double h = std::max(std::min(dt, config.t_max - state.t), config.step.dt_min);
    StepOutcome out;
    try {
      out = step(state, f, h, config.step);
    } catch (const Error& e) {
      return finish(TerminationStatus::StepFailure, e.what(), steps, false);
    }
    ++steps;
    result.halvings += out.halvings;
    result.max_energy_increase = std::max(result.max_energy_increase, out.energy_change);
    state = out.state;
    dt = out.halvings == 0 ? std::min(dt * config.dt_growth, config.dt_max) : out.dt_used;

    if (steps % config.record_every == 0) {
      const TrajectoryRecord rec = record(steps);
      if (auto s = classify(rec)) return finish(*s, std::string(to_string(*s)), steps, true);
    }
  }
}

}  // namespace crflow
