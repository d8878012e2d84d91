#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace crflow {

/// Integrand on H^n depending only on (|z|^2, tau).
using HeisenbergIntegrand = std::function<double(double z_norm_sq, double tau)>;

struct IntegralEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  int level = 0;
};

/// Integral of g over H^n against dz dtau.
///
/// Reduction: dz = omega/2 |z|^{2n-2} d|z|^2 with omega = 2 pi^n/(n-1)!, then polar
/// coordinates (|z|^2, tau) = R (cos phi, sin phi) and R = 1/s beyond R = 1. Each of the
/// three one-dimensional ranges carries 2^level composite 12-point Gauss-Legendre panels;
/// the error estimate is |Q_level - Q_{level-1}|.
IntegralEstimate heisenberg_integral(const HeisenbergIntegrand& g, int n, int level = 5);

/// Single evaluation at a given level, no error estimate.
double heisenberg_quadrature(const HeisenbergIntegrand& g, int n, int level);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Importance-sampled estimate: phi uniform, R with density 1/(1+R)^2.
MonteCarloEstimate heisenberg_monte_carlo(const HeisenbergIntegrand& g, int n, std::size_t samples, std::uint64_t seed);

/// Vol(S^{2n+1}, theta0) as the integral of the Cayley volume density; cached per n.
double sphere_volume(int n);

enum class ConstantName { A1, A2, A3, A4, A5, A6 };

inline constexpr std::array<ConstantName, 6> kAllConstants = {ConstantName::A1, ConstantName::A2, ConstantName::A3,
                                                              ConstantName::A4, ConstantName::A5, ConstantName::A6};

std::string_view to_string(ConstantName name);
ConstantName constant_from_string(std::string_view name);
HeisenbergIntegrand constant_integrand(ConstantName name, int n);

struct ConstantEstimate {
  ConstantName name = ConstantName::A1;
  int n = 0;
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::string method;
};

/// Quadrature at level refinement + 3 against refinement + 2. Throws NonConvergentQuadrature
/// when the error estimate exceeds rel_tol * |value|.
ConstantEstimate constant(ConstantName name, int n, int refinement, double rel_tol = 1e-6);

MonteCarloEstimate constant_monte_carlo(ConstantName name, int n, std::size_t samples, std::uint64_t seed);

/// Integral I(eps) in Theta_{n+1} = Vol - 2 eps^2 I(eps) for a centered bubble of scale eps,
/// with the integrand exactly as in the shadow expansion (no 4^{n+1} density factor).
IntegralEstimate shadow_expansion_integral(double eps, int n, int level = 6);

/// (Vol^2 - Theta_{n+1}^2) / eps^2 from shadow_expansion_integral.
double shadow_expansion_ratio(double eps, int n, int level = 6);

/// Theta_{n+1} = integral of phi_{n+1} dV_theta0 for the centered bubble automorphism, with the
/// full Cayley density; the exact counterpart of the expansion above.
double shadow_last_coordinate(double eps, int n, int level = 6);

}  // namespace crflow
