#include <benchmark/benchmark.h>

#include <random>

#include "irtid/experiments.hpp"
#include "irtid/manifest.hpp"
#include "irtid/recovery.hpp"
#include "irtid/special_fns.hpp"

using namespace irtid;

static void BM_NormalQuantile(benchmark::State& state) {
  std::vector<double> u(4096);
  std::mt19937_64 gen(1);
  for (auto& x : u) x = std::uniform_real_distribution<double>(1e-12, 1.0 - 1e-12)(gen);
  std::size_t j = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_quantile(u[j++ & 4095]));
  }
}
BENCHMARK(BM_NormalQuantile);

static void BM_PoissonBinomialPmf(benchmark::State& state) {
  std::vector<double> p(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 gen(2);
  for (auto& x : p) x = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
  for (auto _ : state) benchmark::DoNotOptimize(poisson_binomial_pmf(p));
}
BENCHMARK(BM_PoissonBinomialPmf)->RangeMultiplier(4)->Range(16, 1024);

static void BM_RestScoreTables(benchmark::State& state) {
  const ModelSpec m = heterogeneous_4pl_sampler().make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rest_score_tables(m));
}
BENCHMARK(BM_RestScoreTables)->Arg(25)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_RecoverAllOracle(benchmark::State& state) {
  const ModelSpec m = heterogeneous_4pl_sampler().make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(recover_all_oracle(m, 0.1, 0.9));
}
BENCHMARK(BM_RecoverAllOracle)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SimulateResponses(benchmark::State& state) {
  const ModelSpec m = heterogeneous_4pl_sampler().make(50);
  const auto rows = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_responses({7, rows, m}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 50);
}
BENCHMARK(BM_SimulateResponses)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
