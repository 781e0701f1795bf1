#include <benchmark/benchmark.h>

#include "prevint/estimators.hpp"

using namespace prevint;

namespace {

const BinormalParams kParams{0.0, 2.5, 1.0};

UnlabeledSample make_test(int n, std::uint64_t seed) {
  RngStream rng(derive_stream_key(seed, 0, StreamPurpose::test_sample, 0));
  return sample_test(kParams, 0.2, n, rng);
}

void BM_PopulationBattery(benchmark::State& state) {
  const TrainingContext ctx = TrainingContext::from_population(kParams, 0.5);
  const MethodEngine engine(ctx, exact_posterior(kParams, 0.5));
  const UnlabeledSample test = make_test(static_cast<int>(state.range(0)), 11);
  engine.estimate(Method::energy, test.features());  // warm the per-point caches
  for (auto _ : state) {
    for (Method m : all_methods()) {
      benchmark::DoNotOptimize(engine.estimate(m, test.features()));
    }
  }
}
BENCHMARK(BM_PopulationBattery)->Arg(50)->Arg(500);

void BM_FiniteBatteryWithRefit(benchmark::State& state) {
  RngStream train_rng(derive_stream_key(7, 0, StreamPurpose::training_sample, 0));
  const LabeledSample sample = sample_training(kParams, 33, 67, train_rng);
  const UnlabeledSample test = make_test(static_cast<int>(state.range(0)), 13);
  for (auto _ : state) {
    const TrainingContext ctx = TrainingContext::from_sample(sample);
    const PosteriorModel model = fit_logistic(sample);
    const MethodEngine engine(ctx, model);
    for (Method m : all_methods()) {
      benchmark::DoNotOptimize(engine.estimate(m, test.features()));
    }
  }
}
BENCHMARK(BM_FiniteBatteryWithRefit)->Arg(50)->Arg(500);

void BM_LogisticFit(benchmark::State& state) {
  RngStream rng(derive_stream_key(3, 0, StreamPurpose::training_sample, 0));
  const LabeledSample sample =
      sample_training(kParams, static_cast<int>(state.range(0)) / 3,
                      2 * static_cast<int>(state.range(0)) / 3, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_logistic(sample));
  }
}
BENCHMARK(BM_LogisticFit)->Arg(100)->Arg(1000);

}  // namespace
