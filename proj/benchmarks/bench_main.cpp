#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qtradeoff/tradeoff.hpp"

using namespace qtradeoff;

namespace {

HermitianOperator random_hermitian(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      m(i, j) = Complex(normal(rng), i == j ? 0.0 : normal(rng));
      m(j, i) = std::conj(m(i, j));
    }
  return HermitianOperator(m);
}

Scenario scenario_for(int which) {
  switch (which) {
    case 0: return build_pure(2);
    case 1: return build_pure(3);
    case 2: return build_maxent(2);
    default: return build_spin(Spin::parse("3/2"));
  }
}

}  // namespace

static void BM_Eigh(benchmark::State& state) {
  Rng rng(1);
  const HermitianOperator h = random_hermitian(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
}
BENCHMARK(BM_Eigh)->Arg(4)->Arg(16)->Arg(64);

static void BM_HaarUnitary(benchmark::State& state) {
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(haar_unitary(static_cast<std::size_t>(state.range(0)), rng));
}
BENCHMARK(BM_HaarUnitary)->Arg(2)->Arg(4)->Arg(8);

static void BM_MonteCarloTwirl(benchmark::State& state) {
  Rng rng(3);
  const Scenario s = build_pure(2);
  const RepSampler rep = s.seed_rep();
  const HermitianOperator y = HermitianOperator::projector(kron(s.psi0, s.psi0), s.shape);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_twirl(rep, y, 1000, rng));
}
BENCHMARK(BM_MonteCarloTwirl)->Unit(benchmark::kMillisecond);

static void BM_MaxG(benchmark::State& state) {
  const Scenario s = scenario_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(max_g(s));
  state.SetLabel(s.name() + " " + s.parameter());
}
BENCHMARK(BM_MaxG)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_LagrangianSweep(benchmark::State& state) {
  const Scenario s = scenario_for(static_cast<int>(state.range(0)));
  const std::vector<double> grid = default_lambda_grid(25, 1e3);
  for (auto _ : state) benchmark::DoNotOptimize(curve_lagrangian(s, grid));
  state.SetLabel(s.name() + " " + s.parameter());
}
BENCHMARK(BM_LagrangianSweep)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
