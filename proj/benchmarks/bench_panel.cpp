#include <benchmark/benchmark.h>

#include "avrank/fixed_t.hpp"
#include "avrank/panel.hpp"
#include "avrank/rng.hpp"

namespace {

using namespace avrank;

IfeConfig scm_config(int n, int t_total) {
  IfeConfig cfg;
  cfg.n_controls = n;
  cfg.t_total = t_total;
  cfg.t0 = t_total * 2 / 5;
  cfg.t_blank = cfg.t0 / 2;
  cfg.r_factors = 3;
  cfg.rho_lambda = 0.75;
  cfg.rho_eps = 0.5;
  cfg.seed = 11;
  return cfg;
}

void BM_SimulateIfe(benchmark::State& state) {
  IfeConfig cfg = scm_config(static_cast<int>(state.range(0)),
                             static_cast<int>(state.range(1)));
  for (auto _ : state) {
    cfg.seed += 1;
    benchmark::DoNotOptimize(simulate_ife(cfg));
  }
}
BENCHMARK(BM_SimulateIfe)->Args({20, 150})->Args({50, 300});

void BM_ScmWeights(benchmark::State& state) {
  IfeConfig cfg = scm_config(static_cast<int>(state.range(0)), 150);
  Panel panel = simulate_ife(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scm_weights(panel));
  }
}
BENCHMARK(BM_ScmWeights)->Arg(20)->Arg(50);

void BM_FixedTSampled(benchmark::State& state) {
  Rng rng(7);
  std::vector<double> blanks(25);
  std::vector<double> post(static_cast<int>(state.range(0)));
  for (double& v : blanks) v = rng.normal();
  for (double& v : post) v = rng.normal();
  FixedTOptions opts;
  opts.mode = FixedTOptions::Mode::sampled;
  opts.sample_draws = 2000;
  for (auto _ : state) {
    opts.seed += 1;
    benchmark::DoNotOptimize(fixed_t_pvalue(blanks, post, opts));
  }
}
BENCHMARK(BM_FixedTSampled)->Arg(5)->Arg(20);

void BM_FixedTExact(benchmark::State& state) {
  Rng rng(8);
  std::vector<double> blanks(12);
  std::vector<double> post(static_cast<int>(state.range(0)));
  for (double& v : blanks) v = rng.normal();
  for (double& v : post) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fixed_t_pvalue(blanks, post));
  }
}
BENCHMARK(BM_FixedTExact)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
