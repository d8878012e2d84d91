#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crflow/bubble.hpp"
#include "crflow/constants.hpp"
#include "crflow/errors.hpp"
#include "crflow/morse.hpp"
#include "crflow/scenario.hpp"
#include "crflow/selftest.hpp"

namespace {

using namespace crflow;

constexpr int kUsageExit = 64;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  ScenarioConfig config;
  ScenarioSetup setup;
  try {
    config = load_scenario(config_path);
    setup = prepare_scenario(config);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigErrorExit;
  }
  try {
    const ScenarioOutcome out = run_scenario(config, setup, out_dir);
    std::cout << out.summary_json << '\n';
    return out.exit_code;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BetaGateViolation || e.kind() == ErrorKind::ConfigError) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigErrorExit;
    }
    std::cerr << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(TerminationStatus::StepFailure);
  }
}

int cmd_constants(int n, int refine, const std::string& json_path) {
  nlohmann::json rows = nlohmann::json::array();
  bool complete = true;
  std::printf("%-4s %24s %12s %s\n", "name", "value", "error", "positive");
  for (const ConstantName name : kAllConstants) {
    try {
      const ConstantEstimate c = constant(name, n, refine);
      const bool positive = c.value > c.abs_error_estimate;
      std::printf("%-4s %24.17g %12.3e %s\n", std::string(to_string(name)).c_str(), c.value, c.abs_error_estimate,
                  positive ? "true" : "false");
      rows.push_back({{"name", std::string(to_string(name))},
                      {"value", c.value},
                      {"error", c.abs_error_estimate},
                      {"positive", positive}});
    } catch (const Error& e) {
      std::printf("%-4s %s\n", std::string(to_string(name)).c_str(), e.what());
      complete = false;
      break;
    }
  }
  nlohmann::json doc{{"n", n}, {"refinement", refine}, {"complete", complete}, {"constants", rows}};
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << doc.dump(2) << '\n';
  }
  return complete ? 0 : 1;
}

int cmd_morse(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << path << ": cannot open file\n";
    return kConfigErrorExit;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const GateReport report = theorem_gate(parse_morse_data(ss.str()));
    std::cout << format_report(report);
    return report.hypotheses_satisfied ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kConfigErrorExit;
  }
}

int cmd_bubble(const std::vector<double>& coords, double eps, int J, const std::string& out_path) {
  if (coords.size() < 4 || coords.size() % 2 != 0) {
    std::cerr << "--p needs 2n+2 reals (re, im pairs), n >= 1\n";
    return kUsageExit;
  }
  const int n = static_cast<int>(coords.size()) / 2 - 1;
  CVec p(n + 1);
  for (int j = 0; j <= n; ++j) p[j] = cplx(coords[static_cast<std::size_t>(2 * j)], coords[static_cast<std::size_t>(2 * j + 1)]);
  if (!(p.norm() > 0.0) || !(eps > 0.0) || eps > 1.0) {
    std::cerr << "--p must be nonzero and --eps must lie in (0, 1]\n";
    return kUsageExit;
  }
  try {
    const SpherePoint center = SpherePoint::normalized(p);
    const BasisPtr basis = build_basis(n, J > 0 ? J : (n == 1 ? 8 : 4));
    const Eigen::VectorXd exact = bubble_node_values(center, eps, *basis);
    const Field projected = Field::from_values(basis, exact);
    const double residual = (projected.values() - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff();

    std::ofstream file;
    if (!out_path.empty()) file.open(out_path);
    std::ostream& os = out_path.empty() ? std::cout : file;
    for (int j = 1; j <= n + 1; ++j) os << "x_" << j << "_re,x_" << j << "_im,";
    os << "weight,u_exact,u_projected\n";
    for (Eigen::Index k = 0; k < basis->node_count(); ++k) {
      for (int j = 0; j <= n; ++j) {
        const cplx x = basis->node_coords()(j, k);
        os << g17(x.real()) << ',' << g17(x.imag()) << ',';
      }
      os << g17(basis->weights()[k]) << ',' << g17(exact[k]) << ',' << g17(projected.values()[k]) << '\n';
    }
    std::cerr << "relative sup projection residual " << residual << " (J=" << basis->degree() << ")\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << '\n';
    return 1;
  }
}

int cmd_selftest() {
  const SelftestReport report = run_selftest({}, [](const CheckResult& r) {
    std::printf("%s %-22s %8.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
  });
  if (report.passed()) {
    std::printf("selftest passed\n");
    return 0;
  }
  std::printf("selftest failed:");
  for (const auto& name : report.failures()) std::printf(" %s", name.c_str());
  std::printf("\n");
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Webster curvature flow on the CR sphere"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "Integrate the flow for a JSON scenario");
  run->add_option("config", config_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Directory for trajectory.csv and summary.json");

  int n = 0;
  int refine = 1;
  std::string json_path;
  auto* constants = app.add_subcommand("constants", "Tabulate A1..A6 by Heisenberg quadrature");
  constants->add_option("--n", n, "Dimension parameter, 1..4")->required()->check(CLI::Range(1, 4));
  constants->add_option("--refine", refine, "Refinement level")->check(CLI::Range(0, 8));
  constants->add_option("--json", json_path, "Also write the table as JSON");

  std::string morse_path;
  auto* morse = app.add_subcommand("morse", "Check the Morse and pinching hypotheses");
  morse->add_option("file", morse_path, "Critical point data (JSON)")->required();

  std::vector<double> coords;
  double eps = 0.5;
  int J = 0;
  std::string bubble_out;
  auto* bubble = app.add_subcommand("bubble", "Export bubble values on the quadrature grid as CSV");
  bubble->add_option("--p", coords, "Center as re,im pairs")->required()->delimiter(',');
  bubble->add_option("--eps", eps, "Concentration scale in (0, 1]")->required();
  bubble->add_option("--J", J, "Truncation degree");
  bubble->add_option("--out", bubble_out, "CSV path (stdout if omitted)");

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  if (*run) return cmd_run(config_path, out_dir);
  if (*constants) return cmd_constants(n, refine, json_path);
  if (*morse) return cmd_morse(morse_path);
  if (*bubble) return cmd_bubble(coords, eps, J, bubble_out);
  if (*selftest) return cmd_selftest();
  return kUsageExit;
}
