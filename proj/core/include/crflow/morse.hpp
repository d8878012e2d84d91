#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crflow/heisenberg.hpp"

namespace crflow {

struct CriticalPoint {
  /// Morse index in [0, 2n+1].
  int index = 0;
  /// Sign of the sub-Laplacian of f at the point: -1 or +1.
  int laplacian_sign = -1;
  double f_value = 0.0;
  std::optional<SpherePoint> location;
};

struct MorseData {
  int n = 1;
  std::vector<CriticalPoint> critical_points;
  double f_max = 0.0;
  double f_min = 0.0;

  /// Throws IndexOutOfRange, NonPositiveMin or InvalidArgument on malformed data.
  void validate() const;
};

/// m_i = #{laplacian_sign = -1, index = 2n+1-i}, i = 0..2n+1.
std::vector<int> counts(const MorseData& data);

/// Forward substitution of m_0 = 1 + k_0, m_i = k_{i-1} + k_i, k_{2n+1} = 0.
std::optional<std::vector<int>> solve_k(const std::vector<int>& m, int n);

/// Sum over laplacian_sign = -1 points of (-1)^index.
int degree_sum(const MorseData& data);
/// The same sum from the m vector: sum_i (-1)^{2n+1-i} m_i.
int degree_sum(const std::vector<int>& m, int n);

/// f_max / f_min < 2^{1/n}, strictly. Throws NonPositiveMin when f_min <= 0.
bool sbc_check(double f_max, double f_min, int n);

struct GateReport {
  int n = 1;
  std::vector<int> m;
  std::optional<std::vector<int>> k;
  int degree_sum = 0;
  /// degree_sum != -1.
  bool degree_condition = false;
  bool sbc = false;
  /// No nonnegative k exists and sbc holds.
  bool hypotheses_satisfied = false;
  std::vector<std::string> warnings;
};

GateReport theorem_gate(const MorseData& data);

/// Human-readable multi-line report.
std::string format_report(const GateReport& report);
std::string report_json(const GateReport& report);

/// Parses {"n": .., "f_max": .., "f_min": .., "critical_points": [{"index", "laplacian_sign",
/// "f_value", optional "location"}]}. Throws ConfigError for syntax or schema errors and the
/// validate() kinds for semantic ones.
MorseData parse_morse_data(const std::string& json_text);
std::string morse_data_json(const MorseData& data);

}  // namespace crflow
