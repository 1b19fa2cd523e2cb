#include <random>

#include <benchmark/benchmark.h>

#include "dsbm/acceptance.hpp"
#include "dsbm/block_graph.hpp"
#include "dsbm/density.hpp"
#include "dsbm/dyson.hpp"
#include "dsbm/rmt.hpp"

using namespace dsbm;

namespace {

VarianceProfile example1() {
  Matrix s(4, 4);
  s << 0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0;
  return VarianceProfile::from_variances(s);
}

void BM_KappaRandom(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto m = acceptance::random_admissible_profile(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kappa_of(m));
}
BENCHMARK(BM_KappaRandom)->Arg(4)->Arg(16)->Arg(64);

void BM_DysonSolve(benchmark::State& state) {
  const DysonSolver solver(example1());
  const double tau = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve({.tau = tau}));
}
BENCHMARK(BM_DysonSolve)->Arg(2)->Arg(5)->Arg(8);

void BM_DysonSolveRandom(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const DysonSolver solver(acceptance::random_admissible_profile(rng, static_cast<int>(state.range(0))));
  const double tau = 0.1 * solver.rho();
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve({.tau = tau}));
}
BENCHMARK(BM_DysonSolveRandom)->Arg(8)->Arg(32)->Arg(128);

void BM_DensityLinearResponse(benchmark::State& state) {
  const DysonSolver solver(example1());
  for (auto _ : state) benchmark::DoNotOptimize(density_sigma(solver, Complex(0.3, 0.1)));
}
BENCHMARK(BM_DensityLinearResponse);

void BM_DensityIntegral(benchmark::State& state) {
  const auto m = example1();
  for (auto _ : state) benchmark::DoNotOptimize(density_sigma_via_integral(m, Complex(0.3, 0.1)));
}
BENCHMARK(BM_DensityIntegral)->Unit(benchmark::kMillisecond);

void BM_SampleAdjacency(benchmark::State& state) {
  Matrix p = Matrix::Constant(4, 4, 0.5);
  const SBMSpec spec{4, static_cast<int>(state.range(0)), p, 1};
  for (auto _ : state) benchmark::DoNotOptimize(sample_adjacency(spec));
}
BENCHMARK(BM_SampleAdjacency)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = sample_adjacency({4, n, Matrix::Constant(4, 4, 0.5), 1});
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(a, n));
}
BENCHMARK(BM_Spectrum)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
