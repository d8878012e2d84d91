#include "crflow/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crflow/bubble.hpp"
#include "crflow/critical_points.hpp"
#include "crflow/errors.hpp"
#include "crflow/normalization.hpp"

namespace crflow {

using nlohmann::json;

namespace {

class Anchor {
 public:
  Anchor(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  int line_of_offset(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
  }

  int line_of_key(const std::string& key) const {
    const auto pos = text_.find("\"" + key + "\"");
    return pos == std::string::npos ? 1 : line_of_offset(pos);
  }

  [[noreturn]] void error_at_line(int line, const std::string& message) const {
    fail(ErrorKind::ConfigError, source_ + ":" + std::to_string(line) + ": " + message);
  }

  [[noreturn]] void error(const std::string& key, const std::string& message) const {
    error_at_line(line_of_key(key), message);
  }

 private:
  const std::string& text_;
  std::string source_;
};

template <typename T>
T get_as(const json& obj, const std::string& key, const Anchor& anchor, const char* type_name) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    anchor.error(key, "\"" + key + "\" must be " + type_name);
  }
}

double positive_number(const json& obj, const std::string& key, double fallback, const Anchor& anchor) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) anchor.error(key, "\"" + key + "\" must be a number");
  const double v = obj.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) anchor.error(key, "\"" + key + "\" must be positive");
  return v;
}

Monomial parse_exponents(const json& term, int n, const Anchor& anchor) {
  Monomial m{std::vector<int>(static_cast<std::size_t>(n + 1), 0), std::vector<int>(static_cast<std::size_t>(n + 1), 0)};
  for (const char* key : {"a", "b"}) {
    if (!term.contains(key)) continue;
    const json& arr = term.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != n + 1) {
      anchor.error(key, std::string("\"") + key + "\" must be an array of n+1 nonnegative integers");
    }
    auto& dst = key[0] == 'a' ? m.a : m.b;
    for (std::size_t j = 0; j < arr.size(); ++j) {
      if (!arr[j].is_number_integer() || arr[j].get<int>() < 0) {
        anchor.error(key, std::string("\"") + key + "\" entries must be nonnegative integers");
      }
      dst[j] = arr[j].get<int>();
    }
  }
  return m;
}

Polynomial parse_terms(const json& obj, int n, const Anchor& anchor, const std::string& owner) {
  Polynomial p(n);
  if (obj.contains("constant")) {
    if (!obj["constant"].is_number()) anchor.error("constant", "\"constant\" must be a number");
    p.add_term({std::vector<int>(static_cast<std::size_t>(n + 1), 0), std::vector<int>(static_cast<std::size_t>(n + 1), 0)},
               obj["constant"].get<double>());
  }
  if (!obj.contains("terms") || !obj["terms"].is_array()) anchor.error(owner, "\"" + owner + "\" needs a \"terms\" array");
  for (const json& term : obj["terms"]) {
    if (!term.is_object()) anchor.error("terms", "each term must be an object");
    const Monomial m = parse_exponents(term, n, anchor);
    const double re = term.contains("re") ? get_as<double>(term, "re", anchor, "a number") : 0.0;
    const double im = term.contains("im") ? get_as<double>(term, "im", anchor, "a number") : 0.0;
    if (m.degree() > 4) anchor.error("terms", "polynomial terms are limited to total degree 4");
    p.add_term(m, cplx(re, im));
  }
  return p.real_part();
}

SpherePoint parse_point(const json& arr, int n, const Anchor& anchor, const std::string& key) {
  if (!arr.is_array()) anchor.error(key, "\"" + key + "\" must be an array");
  CVec x(n + 1);
  if (static_cast<int>(arr.size()) == n + 1 && arr[0].is_array()) {
    for (int j = 0; j <= n; ++j) {
      const json& c = arr[static_cast<std::size_t>(j)];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
        anchor.error(key, "\"" + key + "\" entries must be [re, im] pairs");
      }
      x[j] = cplx(c[0].get<double>(), c[1].get<double>());
    }
  } else if (static_cast<int>(arr.size()) == 2 * n + 2) {
    for (int j = 0; j <= n; ++j) {
      if (!arr[static_cast<std::size_t>(2 * j)].is_number() || !arr[static_cast<std::size_t>(2 * j + 1)].is_number()) {
        anchor.error(key, "\"" + key + "\" must hold numbers");
      }
      x[j] = cplx(arr[static_cast<std::size_t>(2 * j)].get<double>(), arr[static_cast<std::size_t>(2 * j + 1)].get<double>());
    }
  } else {
    anchor.error(key, "\"" + key + "\" must list n+1 [re, im] pairs or 2n+2 reals");
  }
  if (!(x.norm() > 0.0)) anchor.error(key, "\"" + key + "\" must be nonzero");
  return SpherePoint::normalized(x);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Polynomial preset_f(const std::string& name, int n) {
  const double R0 = standard_curvature(n);
  Polynomial one = Polynomial::constant(n, 1.0);
  if (name == "constant") return one * R0;
  if (name == "dipole") return (one + Polynomial::coordinate(n, n).real_part() * 0.2) * R0;
  if (name == "two-peak") {
    const Polynomial a = Polynomial::coordinate(n, 0).real_part();
    const Polynomial d = (Polynomial::coordinate(n, n) - Polynomial::coordinate_conj(n, n)) * cplx(0.0, -0.5);
    return (one + (a * a + d * 1.5) * 0.15) * R0;
  }
  fail(ErrorKind::InvalidArgument, "unknown f preset '" + name + "' (constant, dipole, two-peak)");
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source_name) {
  const Anchor anchor(text, source_name);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    anchor.error_at_line(anchor.line_of_offset(e.byte > 0 ? e.byte - 1 : 0), std::string("syntax error: ") + e.what());
  }
  if (!doc.is_object()) anchor.error_at_line(1, "top level must be a JSON object");

  static const std::set<std::string> known = {
      "n", "J", "f", "u0", "dt_init", "dt_max", "dt_min", "t_max", "tol_converge", "blowup_factor", "record_every",
      "enforce_beta", "seed", "monotonicity_slack", "concentration_radius", "track_shadow", "wall_seconds", "max_steps",
      "morse"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) anchor.error(key, "unknown key \"" + key + "\"");
  }

  ScenarioConfig c;
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer()) anchor.error("n", "\"n\" must be an integer");
    c.n = doc["n"].get<int>();
    if (c.n < 1 || c.n > 4) anchor.error("n", "\"n\" must lie in [1, 4]");
  }
  c.J = c.n == 1 ? 8 : 4;
  if (doc.contains("J")) {
    if (!doc["J"].is_number_integer()) anchor.error("J", "\"J\" must be an integer");
    c.J = doc["J"].get<int>();
    if (c.J < 2) anchor.error("J", "\"J\" must be at least 2");
  }

  if (!doc.contains("f")) anchor.error_at_line(1, "missing \"f\"");
  const json& fj = doc["f"];
  if (fj.is_string()) {
    c.f_label = fj.get<std::string>();
  } else if (fj.is_object() && fj.contains("preset")) {
    if (!fj["preset"].is_string()) anchor.error("preset", "\"preset\" must be a string");
    c.f_label = fj["preset"].get<std::string>();
  } else if (fj.is_object()) {
    c.f_label = "polynomial";
    c.f = parse_terms(fj, c.n, anchor, "f");
  } else {
    anchor.error("f", "\"f\" must be a preset name or an object");
  }
  if (c.f_label != "polynomial") {
    try {
      c.f = preset_f(c.f_label, c.n);
    } catch (const Error& e) {
      anchor.error("f", e.what());
    }
  }
  if (c.f.degree() > c.J) anchor.error("f", "f has degree " + std::to_string(c.f.degree()) + " above J");

  if (doc.contains("u0")) {
    const json& uj = doc["u0"];
    if (!uj.is_object() || !uj.contains("type") || !uj["type"].is_string()) {
      anchor.error("u0", "\"u0\" must be an object with a string \"type\"");
    }
    const std::string type = uj["type"].get<std::string>();
    if (type == "constant") {
      c.u0.kind = InitialDataSpec::Kind::Constant;
    } else if (type == "bubble") {
      c.u0.kind = InitialDataSpec::Kind::Bubble;
      if (!uj.contains("p")) anchor.error("u0", "bubble initial data needs \"p\"");
      c.u0.bubble_center = parse_point(uj["p"], c.n, anchor, "p");
      c.u0.bubble_eps = positive_number(uj, "eps", 0.5, anchor);
      if (c.u0.bubble_eps > 1.0) anchor.error("eps", "\"eps\" must lie in (0, 1]");
    } else if (type == "perturbation") {
      c.u0.kind = InitialDataSpec::Kind::Perturbation;
      c.u0.perturbation = parse_terms(uj, c.n, anchor, "u0");
    } else if (type == "random") {
      c.u0.kind = InitialDataSpec::Kind::Random;
      c.u0.amplitude = positive_number(uj, "amplitude", 0.05, anchor);
      if (c.u0.amplitude >= 1.0) anchor.error("amplitude", "\"amplitude\" must be below 1");
      if (uj.contains("degree")) {
        if (!uj["degree"].is_number_integer() || uj["degree"].get<int>() < 1) {
          anchor.error("degree", "\"degree\" must be a positive integer");
        }
        c.u0.degree = uj["degree"].get<int>();
      }
      if (c.u0.degree > c.J) anchor.error("degree", "\"degree\" exceeds J");
    } else {
      anchor.error("type", "unknown u0 type \"" + type + "\" (constant, bubble, perturbation, random)");
    }
  }

  RunConfig& r = c.run;
  r.dt_init = positive_number(doc, "dt_init", r.dt_init, anchor);
  r.dt_max = positive_number(doc, "dt_max", std::max(r.dt_max, r.dt_init), anchor);
  r.step.dt_min = positive_number(doc, "dt_min", r.step.dt_min, anchor);
  r.t_max = positive_number(doc, "t_max", r.t_max, anchor);
  r.tol_converge = positive_number(doc, "tol_converge", r.tol_converge, anchor);
  r.blowup_factor = positive_number(doc, "blowup_factor", r.blowup_factor, anchor);
  r.step.monotonicity_slack = positive_number(doc, "monotonicity_slack", r.step.monotonicity_slack, anchor);
  r.diagnostics.concentration_radius = positive_number(doc, "concentration_radius", r.diagnostics.concentration_radius, anchor);
  if (doc.contains("wall_seconds")) r.wall_seconds = positive_number(doc, "wall_seconds", 1.0, anchor);
  if (r.step.dt_min > r.dt_init) anchor.error("dt_min", "\"dt_min\" exceeds \"dt_init\"");
  if (doc.contains("record_every")) {
    if (!doc["record_every"].is_number_integer() || doc["record_every"].get<int>() < 1) {
      anchor.error("record_every", "\"record_every\" must be a positive integer");
    }
    r.record_every = doc["record_every"].get<int>();
  }
  if (doc.contains("max_steps")) {
    if (!doc["max_steps"].is_number_integer() || doc["max_steps"].get<long>() < 1) {
      anchor.error("max_steps", "\"max_steps\" must be a positive integer");
    }
    r.max_steps = doc["max_steps"].get<long>();
  }
  if (doc.contains("enforce_beta")) r.enforce_beta = get_as<bool>(doc, "enforce_beta", anchor, "a boolean");
  if (doc.contains("track_shadow")) r.track_shadow = get_as<bool>(doc, "track_shadow", anchor, "a boolean");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) anchor.error("seed", "\"seed\" must be a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("morse")) {
    try {
      if (doc["morse"].is_string()) {
        std::filesystem::path path = doc["morse"].get<std::string>();
        if (path.is_relative()) path = std::filesystem::path(source_name).parent_path() / path;
        std::ifstream in(path);
        if (!in) anchor.error("morse", "cannot open morse data " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        c.morse = parse_morse_data(ss.str());
      } else {
        c.morse = parse_morse_data(doc["morse"].dump());
      }
    } catch (const Error& e) {
      anchor.error("morse", e.what());
    }
    if (c.morse->n != c.n) anchor.error("morse", "morse data dimension differs from \"n\"");
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, path.string() + ":0: cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

Field random_perturbation(const BasisPtr& basis, double amplitude, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis->size());
  for (Eigen::Index i = 0; i < basis->size(); ++i) {
    const int deg = basis->bidegrees()[static_cast<std::size_t>(i)].total();
    if (deg >= 1 && deg <= degree) c[i] = normal(rng);
  }
  Field w(basis, c);
  const double sup = w.values().cwiseAbs().maxCoeff();
  if (sup > 0.0) c *= amplitude / sup;
  c[0] += 1.0;
  return Field(basis, c);
}

ScenarioSetup prepare_scenario(const ScenarioConfig& config) {
  ScenarioSetup s;
  s.basis = build_basis(config.n, config.J);
  s.f = Field::from_polynomial(s.basis, config.f);
  if (!(s.f.min_value() > 0.0)) {
    fail(ErrorKind::ConfigError, "f is not strictly positive on the quadrature grid (min " + fmt(s.f.min_value()) + ")");
  }
  switch (config.u0.kind) {
    case InitialDataSpec::Kind::Constant:
      s.u0 = Field::constant(s.basis, 1.0);
      break;
    case InitialDataSpec::Kind::Bubble:
      try {
        s.u0 = bubble(*config.u0.bubble_center, config.u0.bubble_eps, s.basis);
      } catch (const Error& e) {
        fail(ErrorKind::ConfigError, std::string("u0: ") + e.what());
      }
      break;
    case InitialDataSpec::Kind::Perturbation:
      s.u0 = Field::from_polynomial(s.basis, Polynomial::constant(config.n, 1.0) + *config.u0.perturbation);
      break;
    case InitialDataSpec::Kind::Random:
      s.u0 = random_perturbation(s.basis, config.u0.amplitude, config.u0.degree, config.seed);
      break;
  }
  if (!(s.u0.min_value() > 0.0)) fail(ErrorKind::ConfigError, "u0 is not positive on the quadrature grid");
  return s;
}

int exit_code(TerminationStatus status) {
  switch (status) {
    case TerminationStatus::Converged: return 0;
    case TerminationStatus::Concentrated: return 2;
    case TerminationStatus::TimeLimit: return 3;
    case TerminationStatus::StepFailure: return 4;
  }
  return 4;
}

std::vector<std::string> trajectory_columns(int n) {
  std::vector<std::string> cols = {"t", "E", "E_f", "alpha", "F2", "G2", "kw_residual", "abs_P", "eps"};
  for (int j = 1; j <= n + 1; ++j) {
    cols.push_back("theta_" + std::to_string(j) + "_re");
    cols.push_back("theta_" + std::to_string(j) + "_im");
  }
  cols.emplace_back("max_u");
  cols.emplace_back("mass_concentration");
  return cols;
}

void write_trajectory_header(std::ostream& os, int n) {
  const auto cols = trajectory_columns(n);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_trajectory_row(std::ostream& os, const TrajectoryRecord& rec) {
  const DiagnosticsRecord& d = rec.diag;
  os << fmt(rec.t) << ',' << fmt(d.E) << ',' << fmt(d.E_f) << ',' << fmt(d.alpha) << ',' << fmt(d.F2) << ','
     << fmt(d.G2) << ',' << fmt(d.kw_residual) << ',' << fmt(rec.abs_P) << ',' << fmt(rec.eps);
  for (Eigen::Index j = 0; j < rec.theta.size(); ++j) os << ',' << fmt(rec.theta[j].real()) << ',' << fmt(rec.theta[j].imag());
  os << ',' << fmt(d.max_u) << ',' << fmt(d.mass_concentration) << '\n';
}

namespace {

json complex_array(const CVec& v) {
  json arr = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) arr.push_back({v[j].real(), v[j].imag()});
  return arr;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& config, const ScenarioSetup& setup, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "trajectory.csv");
  if (!csv) fail(ErrorKind::InvalidArgument, "cannot write " + (out_dir / "trajectory.csv").string());
  write_trajectory_header(csv, config.n);

  ScenarioOutcome out;
  out.result = run(setup.u0, setup.f, config.run, [&](const TrajectoryRecord& rec) { write_trajectory_row(csv, rec); });
  out.exit_code = exit_code(out.result.status);

  json summary;
  summary["status"] = std::string(to_string(out.result.status));
  summary["exit_code"] = out.exit_code;
  summary["message"] = out.result.message;
  summary["steps"] = out.result.steps;
  summary["dt_halvings"] = out.result.halvings;
  summary["max_energy_increase"] = out.result.steps > 0 ? json(out.result.max_energy_increase) : json(nullptr);
  summary["n"] = config.n;
  summary["J"] = config.J;
  summary["f"] = config.f_label;
  summary["seed"] = config.seed;
  const TrajectoryRecord& last = out.result.trajectory.back();
  summary["final"] = {{"t", last.t},           {"E", last.diag.E},
                      {"E_f", last.diag.E_f},   {"alpha", last.diag.alpha},
                      {"F2", last.diag.F2},     {"G2", last.diag.G2},
                      {"kw_residual", last.diag.kw_residual}, {"max_u", last.diag.max_u},
                      {"mass_concentration", last.diag.mass_concentration}};

  std::optional<CVec> point = out.result.shadow_point;
  if (!point && last.theta.size() > 0 && std::isfinite(last.theta[0].real()) && last.theta.norm() > 1e-12) {
    point = CVec(last.theta / last.theta.norm());
  }
  if (point) {
    const SpherePoint x = SpherePoint::normalized(*point);
    const CVec grad = sphere_gradient(config.f, x);
    summary["shadow_point"] = complex_array(x.coords());
    summary["f_at_shadow"] = config.f(x).real();
    summary["f_gradient_norm_at_shadow"] = grad.norm();
    summary["f_sub_laplacian_at_shadow"] = sub_laplacian_at(config.f, x);
  } else {
    summary["shadow_point"] = nullptr;
  }
  const double fmax = setup.f.max_value();
  const double fmin = setup.f.min_value();
  summary["sbc"] = {{"f_max_grid", fmax}, {"f_min_grid", fmin}, {"holds", sbc_check(fmax, fmin, config.n)}};
  if (config.morse) summary["morse"] = json::parse(report_json(theorem_gate(*config.morse)));

  out.summary_json = summary.dump(2);
  std::ofstream js(out_dir / "summary.json");
  js << out.summary_json << '\n';
  return out;
}

}  // namespace crflow
