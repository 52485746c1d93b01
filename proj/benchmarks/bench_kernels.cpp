#include <benchmark/benchmark.h>

#include <random>

#include "backflow/bm.hpp"
#include "backflow/extremal.hpp"
#include "backflow/flux.hpp"
#include "backflow/numerics.hpp"

using namespace backflow;

static void BM_GaussLegendre(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre(n, 0.0, kPi));
}
BENCHMARK(BM_GaussLegendre)->Arg(20)->Arg(200)->Arg(800);

static void BM_SymmetricEigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigen(a));
}
BENCHMARK(BM_SymmetricEigen)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_InfiniteEigenvalue(benchmark::State& state) {
  const ChainParams p = ChainParams::infinite(0.0);
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lambda_p_infinite(p, 1.0, nodes));
}
BENCHMARK(BM_InfiniteEigenvalue)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_RingEigenvalue(benchmark::State& state) {
  const ChainParams p = ChainParams::ring(static_cast<int>(state.range(0)), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_p_ring(p, 5.0));
}
BENCHMARK(BM_RingEigenvalue)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_RingFlux(benchmark::State& state) {
  const ChainParams p = ChainParams::ring(static_cast<int>(state.range(0)), 0.5);
  const RingCoeffs c = ring_optimal_coeffs(p, 3, 3.0, Branch::Minus);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(general_flux_ring(c, p, 3, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_RingFlux)->Arg(9)->Arg(100)->Arg(1000);
BENCHMARK_MAIN();
