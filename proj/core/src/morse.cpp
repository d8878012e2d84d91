#include "crflow/morse.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "crflow/errors.hpp"

namespace crflow {

using nlohmann::json;

void MorseData::validate() const {
  if (n < 1) fail(ErrorKind::InvalidArgument, "morse data: n must be >= 1");
  if (!(f_min > 0.0)) fail(ErrorKind::NonPositiveMin, "morse data: f_min must be positive");
  if (!(f_max >= f_min)) fail(ErrorKind::InvalidArgument, "morse data: f_max < f_min");
  for (std::size_t i = 0; i < critical_points.size(); ++i) {
    const CriticalPoint& cp = critical_points[i];
    const std::string where = "critical point " + std::to_string(i);
    if (cp.index < 0 || cp.index > 2 * n + 1) {
      fail(ErrorKind::IndexOutOfRange,
           where + ": index " + std::to_string(cp.index) + " outside [0, " + std::to_string(2 * n + 1) + "]");
    }
    if (cp.laplacian_sign != -1 && cp.laplacian_sign != 1) {
      fail(ErrorKind::InvalidArgument, where + ": laplacian_sign must be -1 or +1");
    }
    if (cp.f_value < f_min || cp.f_value > f_max) {
      fail(ErrorKind::InvalidArgument, where + ": f_value outside [f_min, f_max]");
    }
    if (cp.location && cp.location->n() != n) fail(ErrorKind::InvalidArgument, where + ": location has wrong dimension");
  }
}

std::vector<int> counts(const MorseData& data) {
  data.validate();
  std::vector<int> m(static_cast<std::size_t>(2 * data.n + 2), 0);
  for (const CriticalPoint& cp : data.critical_points) {
    if (cp.laplacian_sign < 0) ++m[static_cast<std::size_t>(2 * data.n + 1 - cp.index)];
  }
  return m;
}

std::optional<std::vector<int>> solve_k(const std::vector<int>& m, int n) {
  const auto len = static_cast<std::size_t>(2 * n + 2);
  if (m.size() != len) fail(ErrorKind::InvalidArgument, "solve_k: m must have 2n+2 entries");
  std::vector<int> k(len, 0);
  k[0] = m[0] - 1;
  if (k[0] < 0) return std::nullopt;
  for (std::size_t i = 1; i < len; ++i) {
    k[i] = m[i] - k[i - 1];
    if (k[i] < 0) return std::nullopt;
  }
  if (k[len - 1] != 0) return std::nullopt;
  return k;
}

int degree_sum(const MorseData& data) {
  data.validate();
  int sum = 0;
  for (const CriticalPoint& cp : data.critical_points) {
    if (cp.laplacian_sign < 0) sum += cp.index % 2 == 0 ? 1 : -1;
  }
  return sum;
}

int degree_sum(const std::vector<int>& m, int n) {
  int sum = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const int index = 2 * n + 1 - static_cast<int>(i);
    sum += index % 2 == 0 ? m[i] : -m[i];
  }
  return sum;
}

bool sbc_check(double f_max, double f_min, int n) {
  if (!(f_min > 0.0)) fail(ErrorKind::NonPositiveMin, "sbc_check: f_min must be positive");
  if (n < 1) fail(ErrorKind::InvalidArgument, "sbc_check: n must be >= 1");
  return f_max / f_min < std::pow(2.0, 1.0 / n);
}

GateReport theorem_gate(const MorseData& data) {
  GateReport r;
  r.n = data.n;
  r.m = counts(data);
  r.k = solve_k(r.m, data.n);
  r.degree_sum = degree_sum(data);
  r.degree_condition = r.degree_sum != -1;
  r.sbc = sbc_check(data.f_max, data.f_min, data.n);
  r.hypotheses_satisfied = !r.k.has_value() && r.sbc;
  if (data.n == 1) r.warnings.emplace_back("n = 1 lies outside the proven range (n >= 2) of the existence theorem");
  return r;
}

namespace {

std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace

std::string format_report(const GateReport& r) {
  std::ostringstream os;
  os << "n            " << r.n << '\n';
  os << "m            " << join(r.m) << '\n';
  os << "k            " << (r.k ? join(*r.k) : std::string("none (no nonnegative solution)")) << '\n';
  os << "degree sum   " << r.degree_sum << (r.degree_condition ? "  (!= -1)" : "  (= -1)") << '\n';
  os << "sbc          " << (r.sbc ? "holds" : "fails") << '\n';
  os << "verdict      " << (r.hypotheses_satisfied ? "hypotheses satisfied" : "hypotheses not satisfied") << '\n';
  for (const std::string& w : r.warnings) os << "warning      " << w << '\n';
  return os.str();
}

std::string report_json(const GateReport& r) {
  json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["k"] = r.k ? json(*r.k) : json(nullptr);
  j["degree_sum"] = r.degree_sum;
  j["degree_condition"] = r.degree_condition;
  j["sbc"] = r.sbc;
  j["hypotheses_satisfied"] = r.hypotheses_satisfied;
  j["warnings"] = r.warnings;
  return j.dump(2);
}

namespace {

SpherePoint parse_location(const json& loc, int n) {
  if (!loc.is_array() || static_cast<int>(loc.size()) != n + 1) {
    fail(ErrorKind::ConfigError, "location must be an array of n+1 coordinates");
  }
  CVec x(n + 1);
  for (int j = 0; j <= n; ++j) {
    const json& c = loc[static_cast<std::size_t>(j)];
    if (c.is_number()) {
      x[j] = c.get<double>();
    } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
      x[j] = cplx(c[0].get<double>(), c[1].get<double>());
    } else {
      fail(ErrorKind::ConfigError, "location entries must be numbers or [re, im] pairs");
    }
  }
  return SpherePoint::normalized(x);
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(ErrorKind::ConfigError, where + ": missing \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::ConfigError, where + ": \"" + key + "\" has the wrong type");
  }
}

}  // namespace

MorseData parse_morse_data(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("morse data: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::ConfigError, "morse data: top level must be an object");
  MorseData d;
  d.n = required<int>(doc, "n", "morse data");
  d.f_max = required<double>(doc, "f_max", "morse data");
  d.f_min = required<double>(doc, "f_min", "morse data");
  if (!doc.contains("critical_points") || !doc["critical_points"].is_array()) {
    fail(ErrorKind::ConfigError, "morse data: \"critical_points\" must be an array");
  }
  std::size_t i = 0;
  for (const json& cp : doc["critical_points"]) {
    const std::string where = "critical_points[" + std::to_string(i++) + "]";
    if (!cp.is_object()) fail(ErrorKind::ConfigError, where + ": must be an object");
    CriticalPoint p;
    p.index = required<int>(cp, "index", where);
    p.laplacian_sign = required<int>(cp, "laplacian_sign", where);
    p.f_value = required<double>(cp, "f_value", where);
    if (cp.contains("location") && !cp["location"].is_null()) p.location = parse_location(cp["location"], d.n);
    d.critical_points.push_back(p);
  }
  d.validate();
  return d;
}

std::string morse_data_json(const MorseData& d) {
  json j;
  j["n"] = d.n;
  j["f_max"] = d.f_max;
  j["f_min"] = d.f_min;
  j["critical_points"] = json::array();
  for (const CriticalPoint& cp : d.critical_points) {
    json c;
    c["index"] = cp.index;
    c["laplacian_sign"] = cp.laplacian_sign;
    c["f_value"] = cp.f_value;
    if (cp.location) {
      json loc = json::array();
      for (Eigen::Index k = 0; k < cp.location->coords().size(); ++k) {
        loc.push_back({cp.location->coords()[k].real(), cp.location->coords()[k].imag()});
      }
      c["location"] = loc;
    }
    j["critical_points"].push_back(c);
  }
  return j.dump(2);
}

}  // namespace crflow
