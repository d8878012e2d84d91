#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crflow/flow.hpp"

namespace crflow {

struct SelftestOptions {
  /// Applied to the eigenvalue table of every basis the suite builds. Identity by default.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eigenvalue_transform;
  /// Step gate used by the monotonicity smoke run.
  StepOptions monotonicity_step;
  double monotonicity_dt = 5e-3;
  int monotonicity_steps = 40;
  int constants_refinement = 1;
  unsigned seed = 7;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  /// Names of failed checks, in run order.
  std::vector<std::string> failures() const;
};

/// Checks, in order: cayley-roundtrip, heisenberg-group-laws, eigen-anchor, gram-orthonormality,
/// stationary-yamabe, Ef-monotonicity, constants-positivity, morse-identity.
SelftestReport run_selftest(const SelftestOptions& options = {},
                            const std::function<void(const CheckResult&)>& on_check = {});

}  // namespace crflow
