#include "crflow/selftest.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "crflow/constants.hpp"
#include "crflow/errors.hpp"
#include "crflow/morse.hpp"
#include "crflow/scenario.hpp"

namespace crflow {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CVec random_sphere(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVec x(n + 1);
  for (auto& c : x) c = cplx(g(rng), g(rng));
  return x / x.norm();
}

HeisenbergPoint random_heisenberg(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  HeisenbergPoint h{CVec(n), g(rng)};
  for (auto& c : h.z) c = cplx(g(rng), g(rng));
  return h;
}

double distance(const HeisenbergPoint& a, const HeisenbergPoint& b) {
  return std::max((a.z - b.z).cwiseAbs().maxCoeff(), std::abs(a.tau - b.tau));
}

double scale(const HeisenbergPoint& a) { return 1.0 + a.z.squaredNorm() + std::abs(a.tau); }

BasisPtr make_basis(int n, int J, const SelftestOptions& opts) {
  BasisPtr b = build_basis(n, J);
  if (!opts.eigenvalue_transform) return b;
  return std::make_shared<const Basis>(b->with_eigenvalues(opts.eigenvalue_transform(b->eigenvalues())));
}

Outcome cayley_roundtrip(const SelftestOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (int i = 0; i < 300; ++i) {
      const CVec x = random_sphere(rng, n);
      if (std::abs(1.0 + x[n]) < 1e-3) continue;
      const SpherePoint back = cayley_inverse(cayley_forward(SpherePoint(x)));
      worst = std::max(worst, (back.coords() - x).norm());
      const HeisenbergPoint h = random_heisenberg(rng, n);
      worst = std::max(worst, distance(cayley_forward(cayley_inverse(h)), h) / scale(h));
    }
  }
  return {worst <= 1e-10, "max error " + sci(worst)};
}

Outcome group_laws(const SelftestOptions& opts) {
  std::mt19937_64 rng(opts.seed + 1);
  std::uniform_real_distribution<double> ur(0.2, 5.0);
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (int i = 0; i < 300; ++i) {
      const HeisenbergPoint a = random_heisenberg(rng, n);
      const HeisenbergPoint b = random_heisenberg(rng, n);
      const HeisenbergPoint c = random_heisenberg(rng, n);
      const double r = ur(rng);
      const double s = scale(a) * scale(b) * scale(c) * r * r;
      const HeisenbergPoint ab_c = heisenberg_product(heisenberg_product(a, b), c);
      const HeisenbergPoint a_bc = heisenberg_product(a, heisenberg_product(b, c));
      worst = std::max(worst, distance(ab_c, a_bc) / s);
      worst = std::max(worst, distance(heisenberg_product(a, heisenberg_inverse(a)), HeisenbergPoint::origin(n)) / s);
      const HeisenbergPoint lhs = dilate(heisenberg_product(a, b), r);
      const HeisenbergPoint rhs = heisenberg_product(dilate(a, r), dilate(b, r));
      worst = std::max(worst, distance(lhs, rhs) / s);
      worst = std::max(worst, distance(delta(a, b, r), translate(dilate(a, r), b)) / s);
    }
  }
  return {worst <= 1e-10, "max relative error " + sci(worst)};
}

Outcome eigen_anchor(const SelftestOptions& opts) {
  double worst_coord = 0.0;
  double worst_table = 0.0;
  for (const auto& [n, J] : {std::pair{1, 4}, std::pair{2, 3}}) {
    const BasisPtr basis = make_basis(n, J, opts);
    for (int j = 0; j <= n; ++j) {
      for (const Polynomial& x : {Polynomial::coordinate(n, j).real_part(),
                                  ((Polynomial::coordinate(n, j) - Polynomial::coordinate_conj(n, j)) * cplx(0.0, -0.5))}) {
        const Field u = Field::from_polynomial(basis, x);
        const Field lu = sub_laplacian(u);
        worst_coord = std::max(worst_coord, (lu.coefficients() + 0.5 * n * u.coefficients()).cwiseAbs().maxCoeff());
      }
    }
    for (Eigen::Index i = 0; i < basis->size(); ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(basis->size(), i);
      const Field direct = Field::from_polynomial(basis, basis->to_polynomial(e).sub_laplacian());
      const Eigen::VectorXd table = basis->apply_sub_laplacian(e);
      worst_table = std::max(worst_table, (direct.coefficients() - table).cwiseAbs().maxCoeff());
    }
  }
  const double worst = std::max(worst_coord, worst_table);
  return {worst <= 1e-10, "coordinate eigenfunctions " + sci(worst_coord) + ", table vs operator " + sci(worst_table)};
}

Outcome gram(const SelftestOptions& opts) {
  double worst = 0.0;
  for (const auto& [n, J] : {std::pair{1, 6}, std::pair{2, 3}}) {
    const BasisPtr basis = make_basis(n, J, opts);
    const Eigen::MatrixXd& phi = basis->synthesis_matrix();
    const Eigen::MatrixXd G = phi.transpose() * basis->weights().asDiagonal() * phi / basis->volume();
    worst = std::max(worst, (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, "max Gram deviation " + sci(worst)};
}

Outcome stationary(const SelftestOptions& opts) {
  const int n = 1;
  const BasisPtr basis = make_basis(n, 4, opts);
  const Field f = Field::constant(basis, standard_curvature(n));
  const Field one = Field::constant(basis, 1.0);
  const double curvature = (webster_curvature_values(one).array() - standard_curvature(n)).abs().maxCoeff();
  const double rhs = flow_rhs(one, f).coefficients().cwiseAbs().maxCoeff();
  FlowState s = make_state(one, f);
  for (int i = 0; i < 100; ++i) s = step(s, f, 1e-2).state;
  const double drift = (s.u.values().array() - 1.0).abs().maxCoeff();
  const bool ok = curvature <= 1e-12 && rhs <= 1e-12 && drift <= 1e-12;
  return {ok, "curvature " + sci(curvature) + ", rhs " + sci(rhs) + ", drift " + sci(drift)};
}

Outcome monotonicity(const SelftestOptions& opts) {
  const int n = 1;
  const BasisPtr basis = make_basis(n, 4, opts);
  const Field f = Field::from_polynomial(basis, preset_f("two-peak", n));
  FlowState s = make_state(random_perturbation(basis, 0.3, 2, opts.seed), f);
  double worst = -std::numeric_limits<double>::infinity();
  const double E0 = s.E_f;
  for (int i = 0; i < opts.monotonicity_steps; ++i) {
    const StepOutcome out = step(s, f, opts.monotonicity_dt, opts.monotonicity_step);
    const double change = energy_f(out.state.u, f) - energy_f(s.u, f);
    worst = std::max(worst, change);
    s = out.state;
  }
  return {worst <= 1e-10, "max step change " + sci(worst) + ", E_f " + sci(E0) + " -> " + sci(s.E_f)};
}

Outcome constants_positivity(const SelftestOptions& opts) {
  std::string detail;
  bool ok = true;
  for (int n = 1; n <= 4; ++n) {
    for (const ConstantName name : kAllConstants) {
      const ConstantEstimate c = constant(name, n, opts.constants_refinement);
      if (!(c.value > 0.0)) {
        ok = false;
        detail += std::string(to_string(name)) + "(n=" + std::to_string(n) + ")=" + sci(c.value) + " ";
      }
    }
  }
  return {ok, ok ? "24 constants positive" : detail};
}

Outcome morse_identity(const SelftestOptions&) {
  long checked = 0;
  long solvable = 0;
  for (int n = 1; n <= 2; ++n) {
    const int len = 2 * n + 2;
    std::vector<int> m(static_cast<std::size_t>(len), 0);
    for (;;) {
      ++checked;
      if (solve_k(m, n)) {
        ++solvable;
        if (degree_sum(m, n) != -1) return {false, "solvable m with degree sum " + std::to_string(degree_sum(m, n))};
      }
      int i = 0;
      while (i < len && m[static_cast<std::size_t>(i)] == 3) m[static_cast<std::size_t>(i++)] = 0;
      if (i == len) break;
      ++m[static_cast<std::size_t>(i)];
    }
  }
  return {true, std::to_string(checked) + " vectors, " + std::to_string(solvable) + " solvable"};
}

}  // namespace

bool SelftestReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::vector<std::string> SelftestReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

SelftestReport run_selftest(const SelftestOptions& options, const std::function<void(const CheckResult&)>& on_check) {
  using Check = Outcome (*)(const SelftestOptions&);
  static const std::pair<const char*, Check> suite[] = {
      {"cayley-roundtrip", cayley_roundtrip},   {"heisenberg-group-laws", group_laws},
      {"eigen-anchor", eigen_anchor},           {"gram-orthonormality", gram},
      {"stationary-yamabe", stationary},        {"Ef-monotonicity", monotonicity},
      {"constants-positivity", constants_positivity}, {"morse-identity", morse_identity},
  };
  SelftestReport report;
  for (const auto& [name, fn] : suite) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = fn(options);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const Error& e) {
      r.passed = false;
      r.detail = std::string(to_string(e.kind())) + ": " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_check) on_check(r);
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace crflow
