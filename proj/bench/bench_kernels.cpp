#include "invgan/group.hpp"
#include "invgan/kernels.hpp"
#include "invgan/measure.hpp"
#include "invgan/ot.hpp"
#include "invgan/rng.hpp"

#include <benchmark/benchmark.h>

#include <limits>
#include <random>

using namespace invgan;

namespace {

Cloud random_cloud(int d, Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Cloud c(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (int k = 0; k < d; ++k) c(k, j) = u(rng);
  return c;
}

void BM_PairwiseSerial(benchmark::State& state) {
  const auto n = state.range(0);
  const Cloud a = random_cloud(2, n, 1), b = random_cloud(2, n, 2);
  Mat out;
  for (auto _ : state) {
    kernels::serial::pairwise_distance(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_PairwiseParallel(benchmark::State& state) {
  const auto n = state.range(0);
  const Cloud a = random_cloud(2, n, 1), b = random_cloud(2, n, 2);
  Mat out;
  for (auto _ : state) {
    kernels::parallel::pairwise_distance(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_OrbitMinSerial(benchmark::State& state) {
  const auto n = state.range(0);
  const FiniteGroup g = make_cyclic_rotation_group(8, 2);
  const Cloud a = random_cloud(2, n, 3), images = orbit_cloud(g, random_cloud(2, n, 4));
  Mat out;
  for (auto _ : state) {
    kernels::serial::blockwise_min_distance(a, images, 8, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_OrbitMinParallel(benchmark::State& state) {
  const auto n = state.range(0);
  const FiniteGroup g = make_cyclic_rotation_group(8, 2);
  const Cloud a = random_cloud(2, n, 3), images = orbit_cloud(g, random_cloud(2, n, 4));
  Mat out;
  for (auto _ : state) {
    kernels::parallel::blockwise_min_distance(a, images, 8, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_RelaxSerial(benchmark::State& state) {
  const auto n = state.range(0);
  const Cloud p = random_cloud(2, n, 5);
  const Vec c = Vec::Zero(2);
  for (auto _ : state) {
    Vec min_dist = Vec::Constant(n, std::numeric_limits<double>::infinity());
    benchmark::DoNotOptimize(kernels::serial::relax_and_argmax(p, c, min_dist));
  }
}

void BM_RelaxParallel(benchmark::State& state) {
  const auto n = state.range(0);
  const Cloud p = random_cloud(2, n, 5);
  const Vec c = Vec::Zero(2);
  for (auto _ : state) {
    Vec min_dist = Vec::Constant(n, std::numeric_limits<double>::infinity());
    benchmark::DoNotOptimize(kernels::parallel::relax_and_argmax(p, c, min_dist));
  }
}

void BM_W1Exact(benchmark::State& state) {
  const auto n = state.range(0);
  const auto mu = EmpiricalMeasure::uniform(random_cloud(2, n, 6));
  const auto nu = EmpiricalMeasure::uniform(random_cloud(2, n, 7));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein1_exact(mu, nu));
}

}  // namespace

BENCHMARK(BM_PairwiseSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairwiseParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_OrbitMinSerial)->Arg(500)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OrbitMinParallel)->Arg(500)->Arg(1000)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_RelaxSerial)->Arg(20000)->Arg(200000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RelaxParallel)->Arg(20000)->Arg(200000)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_W1Exact)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
