#include <benchmark/benchmark.h>

#include "prevint/simulation.hpp"

using namespace prevint;

namespace {

void BM_BootstrapBattery(benchmark::State& state) {
  const BinormalParams params{0.0, 2.5, 1.0};
  const TrainingContext ctx = TrainingContext::from_population(params, 0.5);
  const MethodEngine engine(ctx, exact_posterior(params, 0.5));
  RngStream rng(derive_stream_key(5, 0, StreamPurpose::test_sample, 0));
  const UnlabeledSample test = sample_test(params, 0.2, 500, rng);
  const std::vector<Method> methods = {Method::median_sweep, Method::hellinger4,
                                       Method::hellinger8, Method::energy};
  const StreamFamily streams{17, 0};
  const int replicates = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_bootstrap_battery(ctx, engine, test.features(), methods, replicates, streams));
  }
}
BENCHMARK(BM_BootstrapBattery)->Arg(99)->Arg(999)->Unit(benchmark::kMillisecond);

void BM_ScenarioRun(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.name = "bench";
  cfg.params = BinormalParams{0.0, 2.5, 1.0};
  cfg.m_plus = 33;
  cfg.m_minus = 67;
  cfg.p = 0.33;
  cfg.q = 0.2;
  cfg.n = 50;
  cfg.n_sim = 10;
  cfg.bootstrap_replicates = 199;
  cfg.interval_kind = IntervalSelection::both;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(cfg, 1));
  }
}
BENCHMARK(BM_ScenarioRun)->Unit(benchmark::kMillisecond);

}  // namespace
