#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crflow/flow.hpp"
#include "crflow/morse.hpp"
#include "crflow/polynomial.hpp"

namespace crflow {

/// Named f presets, scaled by R_theta0:
///   constant   R0
///   dipole     R0 (1 + 0.2 Re x_{n+1})
///   two-peak   R0 (1 + 0.15 ((Re x_1)^2 + 1.5 Im x_{n+1}))
/// two-peak has two maxima joined by one saddle of index 2n with negative sub-Laplacian,
/// plus a minimum, so its k system is solvable.
Polynomial preset_f(const std::string& name, int n);

struct InitialDataSpec {
  enum class Kind { Constant, Bubble, Perturbation, Random };
  Kind kind = Kind::Constant;
  std::optional<SpherePoint> bubble_center;
  double bubble_eps = 1.0;
  /// 1 + Re(polynomial) for Perturbation.
  std::optional<Polynomial> perturbation;
  /// Random: 1 + amplitude * (random combination of basis functions of degree 1..degree),
  /// scaled to sup-norm amplitude on the grid.
  double amplitude = 0.05;
  int degree = 2;
};

struct ScenarioConfig {
  int n = 1;
  int J = 8;
  Polynomial f{1};
  std::string f_label;
  InitialDataSpec u0;
  RunConfig run;
  std::uint64_t seed = 0;
  std::optional<MorseData> morse;
};

/// Parses a JSON scenario. Errors are ConfigError with messages anchored as "<source>:<line>: ...".
ScenarioConfig parse_scenario(const std::string& text, const std::string& source_name = "config");
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct ScenarioSetup {
  BasisPtr basis;
  Field f;
  Field u0;
};

/// Builds the basis and fields; rejects f that is not positive on the grid (ConfigError).
ScenarioSetup prepare_scenario(const ScenarioConfig& config);

Field random_perturbation(const BasisPtr& basis, double amplitude, int degree, std::uint64_t seed);

/// 0 Converged, 2 Concentrated, 3 TimeLimit, 4 StepFailure.
int exit_code(TerminationStatus status);
inline constexpr int kConfigErrorExit = 64;

std::vector<std::string> trajectory_columns(int n);
void write_trajectory_header(std::ostream& os, int n);
void write_trajectory_row(std::ostream& os, const TrajectoryRecord& rec);

struct ScenarioOutcome {
  RunResult result;
  int exit_code = 0;
  std::string summary_json;
};

/// Runs the scenario and writes trajectory.csv and summary.json into out_dir.
ScenarioOutcome run_scenario(const ScenarioConfig& config, const ScenarioSetup& setup, const std::filesystem::path& out_dir);

}  // namespace crflow
