#include <benchmark/benchmark.h>

#include "avrank/eprocess.hpp"
#include "avrank/gaussian.hpp"
#include "avrank/kde.hpp"
#include "avrank/plugin.hpp"
#include "avrank/rng.hpp"

namespace {

using namespace avrank;

void BM_KdeCdfBatch(benchmark::State& state) {
  const int samples = static_cast<int>(state.range(0));
  Rng rng(1);
  ReflectedKde kde;
  for (int i = 0; i < samples; ++i) kde.add_sample(rng.uniform_open());
  std::vector<double> queries(25);
  for (int i = 0; i < 25; ++i) queries[i] = (i + 1) / 26.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kde.cdf_batch(queries));
  }
  state.SetItemsProcessed(state.iterations() * samples * queries.size());
}
BENCHMARK(BM_KdeCdfBatch)->Arg(50)->Arg(500)->Arg(2000);

void BM_GaussianReducedStep(benchmark::State& state) {
  const int t0 = static_cast<int>(state.range(0));
  GaussianAltConfig cfg;
  cfg.effect_size = 1.5;
  cfg.mc_draws = static_cast<int>(state.range(1));
  cfg.seed = 2;
  GaussianReducedStatistic stat(cfg, t0);
  NullCategorical q;
  q.t = t0 + 1;
  q.q.assign(t0 + 1, 1.0 / (t0 + 1));
  int slot = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stat.next(q));
    stat.update({0, 1 + slot % (t0 + 1)}, 0);
    ++slot;
  }
}
BENCHMARK(BM_GaussianReducedStep)->Args({10, 4000})->Args({25, 4000})->Args({25, 10000});

void BM_PluginReducedStep(benchmark::State& state) {
  // Full next/push/update cycle; the kernel sample grows as it would in a
  // monitoring run.
  const int t0 = 25;
  Rng rng(3);
  std::vector<double> pre(t0);
  for (double& v : pre) v = rng.normal();
  RankHistory history(pre, 4);
  PluginReducedStatistic stat(5);
  for (auto _ : state) {
    NullCategorical q = history.null_category_probs(history.time() + 1);
    benchmark::DoNotOptimize(stat.next(q));
    stat.update(history.push_observation(rng.normal()), q.t);
  }
}
BENCHMARK(BM_PluginReducedStep)->Iterations(2000);

void BM_EValueReduced(benchmark::State& state) {
  NullCategorical q;
  q.t = 40;
  q.q.assign(26, 1.0 / 26.0);
  Rng rng(6);
  std::vector<double> stat(26);
  for (double& s : stat) s = rng.uniform();
  for (auto _ : state) {
    benchmark::DoNotOptimize(e_value_reduced(stat, 13, q));
  }
}
BENCHMARK(BM_EValueReduced);

}  // namespace
