#include <benchmark/benchmark.h>

#include "crflow/bubble.hpp"
#include "crflow/constants.hpp"
#include "crflow/flow.hpp"
#include "crflow/normalization.hpp"
#include "crflow/scenario.hpp"

using namespace crflow;

static void BM_BuildBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int J = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_basis(n, J));
}
BENCHMARK(BM_BuildBasis)->Args({1, 4})->Args({1, 8})->Args({2, 3})->Unit(benchmark::kMillisecond);

static void BM_Synthesize(benchmark::State& state) {
  const BasisPtr b = build_basis(1, static_cast<int>(state.range(0)));
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(b->size());
  for (auto _ : state) benchmark::DoNotOptimize(b->synthesize(c));
  state.counters["nodes"] = static_cast<double>(b->node_count());
  state.counters["functions"] = static_cast<double>(b->size());
}
BENCHMARK(BM_Synthesize)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_FlowStep(benchmark::State& state) {
  const BasisPtr b = build_basis(1, static_cast<int>(state.range(0)));
  const Field f = Field::from_polynomial(b, preset_f("two-peak", 1));
  const FlowState s = make_state(random_perturbation(b, 0.3, 3, 1), f);
  for (auto _ : state) benchmark::DoNotOptimize(step(s, f, 1e-3));
}
BENCHMARK(BM_FlowStep)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Diagnostics(benchmark::State& state) {
  const BasisPtr b = build_basis(1, 8);
  const Field f = Field::from_polynomial(b, preset_f("two-peak", 1));
  const Field u = random_perturbation(b, 0.3, 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(diagnostics(u, f));
}
BENCHMARK(BM_Diagnostics)->Unit(benchmark::kMillisecond);

static void BM_Centering(benchmark::State& state) {
  const BasisPtr b = build_basis(1, 8);
  CVec p(2);
  p << cplx(0.6, 0.0), cplx(0.0, 0.8);
  const Field u = bubble(SpherePoint(p), 0.5, b);
  CenteringOptions opts;
  opts.compute_v = false;
  for (auto _ : state) benchmark::DoNotOptimize(find_centering(u, opts));
}
BENCHMARK(BM_Centering)->Unit(benchmark::kMillisecond);

static void BM_Constant(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(constant(ConstantName::A5, n, 1));
}
BENCHMARK(BM_Constant)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

static void BM_HeisenbergMonteCarlo(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(constant_monte_carlo(ConstantName::A3, 2, 100000, 3));
}
BENCHMARK(BM_HeisenbergMonteCarlo)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
