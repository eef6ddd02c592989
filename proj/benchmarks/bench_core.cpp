#include "mvbeta/distributions.hpp"
#include "mvbeta/jacobian_lab.hpp"
#include "mvbeta/kde.hpp"
#include "mvbeta/special_functions.hpp"

#include <benchmark/benchmark.h>

using namespace mvbeta;

static void BM_LogMvGamma(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  double r = 0.5 * m + 0.25;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_mv_gamma(m, r));
    r += 1e-9;
  }
}
BENCHMARK(BM_LogMvGamma)->Arg(1)->Arg(3)->Arg(10);

static void BM_SampleWishart(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_wishart(m, m + 2.0, rng));
}
BENCHMARK(BM_SampleWishart)->Arg(2)->Arg(3)->Arg(10);

static void BM_SampleF1(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const BetaParams p = BetaParams::standard(m, m + 2.0, m + 2.0);
  RngStream rng(2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_f1(p, rng));
}
BENCHMARK(BM_SampleF1)->Arg(1)->Arg(2)->Arg(3);

static void BM_DensityF1(benchmark::State& state) {
  RngStream rng(3, 0);
  const GeneralMatrix f(random_jordan_factors(2, rng).reconstruct());
  const BetaParams p = BetaParams::standard(2, 4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(density_f1_unnormalized(f, p));
}
BENCHMARK(BM_DensityF1);

static void BM_JacobianSweep(benchmark::State& state) {
  const auto which = static_cast<JacobianCheck>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_jacobian_sweep(which, 3, 10, 4));
}
BENCHMARK(BM_JacobianSweep)
    ->Arg(static_cast<int>(JacobianCheck::kCongruence))
    ->Arg(static_cast<int>(JacobianCheck::kSquare))
    ->Arg(static_cast<int>(JacobianCheck::kJordan));

static void BM_KdeBatch(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  RngStream rng(5, 0);
  Matrix samples(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    samples(0, i) = rng.normal();
    samples(1, i) = rng.normal();
  }
  Matrix queries = Matrix::Zero(2, 8);
  KdeOptions opts;
  opts.bootstrap = 20;
  for (auto _ : state) benchmark::DoNotOptimize(kde_batch(samples, queries, opts));
}
BENCHMARK(BM_KdeBatch)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
