#include "crflow/constants.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <vector>

#include "crflow/errors.hpp"
#include "crflow/gauss.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

namespace {

constexpr int kPanelPoints = 12;

double sphere_area_factor(int n) {
  // omega_{2n-1} = 2 pi^n / (n-1)!
  return 2.0 * std::pow(std::numbers::pi, n) / std::tgamma(static_cast<double>(n));
}

GaussRule composite(int panels, double lo, double hi) {
  const GaussRule base = gauss_legendre(kPanelPoints);
  GaussRule out;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < kPanelPoints; ++i) {
      out.nodes.push_back(lo + h * (p + base.nodes[static_cast<size_t>(i)]));
      out.weights.push_back(h * base.weights[static_cast<size_t>(i)]);
    }
  }
  return out;
}

struct QuadratureSums {
  double value = 0.0;
  double abs_sum = 0.0;
};

QuadratureSums polar_sums(const HeisenbergIntegrand& g, int n, int level) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "heisenberg integral: n must be >= 1");
  if (level < 0 || level > 12) fail(ErrorKind::InvalidArgument, "heisenberg integral: level out of range");
  const int panels = 1 << level;
  const GaussRule phi = composite(panels, -std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  const GaussRule inner = composite(panels, 0.0, 1.0);
  const double prefactor = sphere_area_factor(n) / 2.0;

  std::vector<double> row_value(phi.nodes.size(), 0.0);
  std::vector<double> row_abs(phi.nodes.size(), 0.0);
  parallel_for(phi.nodes.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t a = lo; a < hi; ++a) {
      const double c = std::cos(phi.nodes[a]);
      const double s = std::sin(phi.nodes[a]);
      const double cpow = std::pow(c, n - 1);
      double sum = 0.0;
      double abs_sum = 0.0;
      for (std::size_t b = 0; b < inner.nodes.size(); ++b) {
        const double t = inner.nodes[b];
        // R = t on [0, 1] and R = 1/t on [1, inf) with dR = dt / t^2.
        const double near = g(t * c, t * s) * std::pow(t, n);
        const double R = 1.0 / t;
        const double far = g(R * c, R * s) * std::pow(R, n) / (t * t);
        const double term = inner.weights[b] * (near + far);
        sum += term;
        abs_sum += inner.weights[b] * (std::abs(near) + std::abs(far));
      }
      row_value[a] = phi.weights[a] * cpow * sum;
      row_abs[a] = phi.weights[a] * cpow * abs_sum;
    }
  });
  QuadratureSums out;
  for (std::size_t a = 0; a < row_value.size(); ++a) {
    out.value += row_value[a];
    out.abs_sum += row_abs[a];
  }
  out.value *= prefactor;
  out.abs_sum *= prefactor;
  return out;
}

double density_bracket(double zz, double tau) { return tau * tau + (1.0 + zz) * (1.0 + zz); }

double pow4(int e) { return std::pow(4.0, e); }

}  // namespace

double heisenberg_quadrature(const HeisenbergIntegrand& g, int n, int level) { return polar_sums(g, n, level).value; }

IntegralEstimate heisenberg_integral(const HeisenbergIntegrand& g, int n, int level) {
  if (level < 1) fail(ErrorKind::InvalidArgument, "heisenberg_integral: level must be >= 1");
  const QuadratureSums fine = polar_sums(g, n, level);
  const QuadratureSums coarse = polar_sums(g, n, level - 1);
  if (!std::isfinite(fine.value) || !std::isfinite(coarse.value)) {
    fail(ErrorKind::NonConvergentQuadrature, "heisenberg_integral: non-finite quadrature sum");
  }
  IntegralEstimate est;
  est.value = fine.value;
  est.abs_error = std::abs(fine.value - coarse.value) + 1e-13 * fine.abs_sum;
  est.level = level;
  return est;
}

MonteCarloEstimate heisenberg_monte_carlo(const HeisenbergIntegrand& g, int n, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) fail(ErrorKind::InvalidArgument, "heisenberg_monte_carlo: need at least 2 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double prefactor = sphere_area_factor(n) / 2.0;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double phi = std::numbers::pi * (uniform(rng) - 0.5);
    double v = uniform(rng);
    while (v >= 1.0) v = uniform(rng);
    const double R = v / (1.0 - v);
    const double c = std::cos(phi);
    const double density = 1.0 / (std::numbers::pi * (1.0 + R) * (1.0 + R));
    const double h = prefactor * g(R * c, R * std::sin(phi)) * std::pow(R * c, n - 1) * R / density;
    const double delta = h - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (h - mean);
  }
  MonteCarloEstimate est;
  est.value = mean;
  est.samples = samples;
  est.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return est;
}

double sphere_volume(int n) {
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  const double scale = pow4(n + 1);
  const double vol = heisenberg_quadrature(
      [n, scale](double zz, double tau) { return scale / std::pow(density_bracket(zz, tau), n + 1); }, n, 6);
  cache.emplace(n, vol);
  return vol;
}

std::string_view to_string(ConstantName name) {
  switch (name) {
    case ConstantName::A1: return "A1";
    case ConstantName::A2: return "A2";
    case ConstantName::A3: return "A3";
    case ConstantName::A4: return "A4";
    case ConstantName::A5: return "A5";
    case ConstantName::A6: return "A6";
  }
  return "?";
}

ConstantName constant_from_string(std::string_view name) {
  for (ConstantName c : kAllConstants) {
    if (to_string(c) == name) return c;
  }
  fail(ErrorKind::InvalidArgument, "unknown constant '" + std::string(name) + "'");
}

HeisenbergIntegrand constant_integrand(ConstantName name, int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "constant_integrand: n must be >= 1");
  const double dn = n;
  switch (name) {
    case ConstantName::A1:
      return [n, c = pow4(n + 1) / dn](double zz, double tau) {
        return c * zz * (1.0 + zz) / std::pow(density_bracket(zz, tau), n + 2);
      };
    case ConstantName::A2:
      return [n, c = pow4(n) / (2.0 * dn)](double zz, double tau) {
        return c * (zz * zz + tau * tau - 1.0) * zz / std::pow(density_bracket(zz, tau), n + 2);
      };
    case ConstantName::A3:
      return [n](double zz, double tau) { return zz / std::pow(density_bracket(zz, tau), n + 1); };
    case ConstantName::A4:
      return [n, c = 2.0 * pow4(n + 1)](double zz, double tau) {
        return c * zz / (zz * zz + tau * tau) / std::pow(density_bracket(zz, tau), n + 1);
      };
    case ConstantName::A5:
      return [n, c = 4.0 * pow4(n + 1)](double zz, double tau) {
        const double r4 = zz * zz + tau * tau;
        return c * zz * (zz * zz - tau * tau) / (r4 * r4) / std::pow(density_bracket(zz, tau), n + 1);
      };
    case ConstantName::A6:
      return [n, c = pow4(n + 1) / (2.0 * dn)](double zz, double tau) {
        return c * zz / std::pow(density_bracket(zz, tau), n + 1);
      };
  }
  fail(ErrorKind::InvalidArgument, "constant_integrand: unknown constant");
}

ConstantEstimate constant(ConstantName name, int n, int refinement, double rel_tol) {
  if (refinement < 0) fail(ErrorKind::InvalidArgument, "constant: refinement must be >= 0");
  const int level = refinement + 3;
  const IntegralEstimate est = heisenberg_integral(constant_integrand(name, n), n, level);
  ConstantEstimate out;
  out.name = name;
  out.n = n;
  out.value = est.value;
  out.abs_error_estimate = est.abs_error;
  out.method = "polar Gauss-Legendre 12-pt, 2^" + std::to_string(level) + " panels per range";
  if (!(est.abs_error <= rel_tol * std::abs(est.value))) {
    fail(ErrorKind::NonConvergentQuadrature, std::string(to_string(name)) + " (n=" + std::to_string(n) +
                                                 "): error estimate " + std::to_string(est.abs_error) +
                                                 " above tolerance at level " + std::to_string(level));
  }
  return out;
}

MonteCarloEstimate constant_monte_carlo(ConstantName name, int n, std::size_t samples, std::uint64_t seed) {
  return heisenberg_monte_carlo(constant_integrand(name, n), n, samples, seed);
}

IntegralEstimate shadow_expansion_integral(double eps, int n, int level) {
  if (!(eps > 0.0)) fail(ErrorKind::NonPositiveScale, "shadow_expansion_integral: eps must be positive");
  const double e2 = eps * eps;
  return heisenberg_integral(
      [n, e2](double zz, double tau) {
        const double a = 1.0 + e2 * zz;
        const double num = e2 * (zz * zz + tau * tau) + zz;
        return num / (a * a + e2 * e2 * tau * tau) / std::pow(density_bracket(zz, tau), n + 1);
      },
      n, level);
}

double shadow_expansion_ratio(double eps, int n, int level) {
  const double I = shadow_expansion_integral(eps, n, level).value;
  const double vol = sphere_volume(n);
  // (Vol - Theta)(Vol + Theta) / eps^2 with Theta = Vol - 2 eps^2 I, without cancellation.
  return 4.0 * I * (vol - eps * eps * I);
}

double shadow_last_coordinate(double eps, int n, int level) {
  const double I = shadow_expansion_integral(eps, n, level).value;
  return sphere_volume(n) - 2.0 * eps * eps * pow4(n + 1) * I;
}

}  // namespace crflow
