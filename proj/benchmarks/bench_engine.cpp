#include <benchmark/benchmark.h>

#include "spsmux/engine.hpp"
#include "spsmux/optimizer.hpp"
#include "spsmux/oracle.hpp"
#include "spsmux/topology.hpp"

namespace {

const spsmux::LossModel kLoss{0.95, 0.9, 0.9, 0.98};

void BM_BuildArms(benchmark::State& state) {
  const spsmux::TopologySpec spec{spsmux::TopologyKind::Oibtm,
                                  static_cast<int>(state.range(0))};
  for (auto _ : state) {
    auto arms = spsmux::build_arm_transmissions(spec, kLoss);
    benchmark::DoNotOptimize(arms.prioritized.data());
  }
}
BENCHMARK(BM_BuildArms)->Arg(8)->Arg(64)->Arg(512);

void BM_SinglePhotonProbability(benchmark::State& state) {
  const spsmux::TopologySpec spec{spsmux::TopologyKind::Oibtm,
                                  static_cast<int>(state.range(0))};
  const auto arms = spsmux::effective_prioritized_arms(spec, kLoss);
  const auto spd = spsmux::DetectionStrategy::spd();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        spsmux::single_photon_probability_for_arms(arms, spd, kLoss.v_d, 0.8));
  }
}
BENCHMARK(BM_SinglePhotonProbability)->Arg(4)->Arg(16)->Arg(64);

void BM_OutputDistribution(benchmark::State& state) {
  const spsmux::TopologySpec spec{spsmux::TopologyKind::Oibtm, 16};
  const auto arms = spsmux::effective_prioritized_arms(spec, kLoss);
  const auto spd = spsmux::DetectionStrategy::spd();
  const int i_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto dist =
        spsmux::output_distribution_for_arms(arms, spd, kLoss.v_d, 0.8, i_max);
    benchmark::DoNotOptimize(dist.probabilities.data());
  }
}
BENCHMARK(BM_OutputDistribution)->Arg(1)->Arg(4)->Arg(16);

void BM_OptimizeLambda(benchmark::State& state) {
  const spsmux::TopologySpec spec{spsmux::TopologyKind::Oibtm,
                                  static_cast<int>(state.range(0))};
  const auto arms = spsmux::effective_prioritized_arms(spec, kLoss);
  const auto spd = spsmux::DetectionStrategy::spd();
  for (auto _ : state) {
    auto out = spsmux::optimize_lambda_for_arms(arms, spd, kLoss.v_d);
    benchmark::DoNotOptimize(out.p1_achievable);
  }
}
BENCHMARK(BM_OptimizeLambda)->Arg(4)->Arg(16)->Arg(64);

void BM_OptimizeN(benchmark::State& state) {
  const auto spd = spsmux::DetectionStrategy::spd();
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto out = spsmux::optimize_n(spsmux::TopologyKind::Oibtm, kLoss, spd, n_max);
    benchmark::DoNotOptimize(out.p1_max);
  }
}
BENCHMARK(BM_OptimizeN)->Arg(16)->Arg(64);

void BM_RunTrials(benchmark::State& state) {
  spsmux::SourceConfig config;
  config.topology = {spsmux::TopologyKind::Oibtm, 10};
  config.loss = {0.92, 0.9, 0.8, 0.98};
  config.mean_photon_number = 0.686;
  const auto trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto est = spsmux::run_trials(config, trials, 42, 1);
    benchmark::DoNotOptimize(est.p_i_hat.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(trials));
}
BENCHMARK(BM_RunTrials)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
