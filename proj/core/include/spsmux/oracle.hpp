#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spsmux/engine.hpp"
#include "spsmux/rng.hpp"

namespace spsmux {

/// Outcome of one simulated pump pulse across all multiplexed units.
struct TrialResult {
  std::optional<int> heralded_unit;  // 1-based priority rank, absent if none
  int output_photons = 0;
};

/// Monte Carlo estimate of the output photon number distribution.
struct McEstimate {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> counts;  // index = output photon number
  std::vector<double> p_i_hat;        // counts / trials
  std::vector<double> std_err;        // binomial standard errors
};

/// Draw one Poisson photon number per unit in priority order, herald on the
/// first unit whose detected count is accepted, then propagate its photons
/// through the arm. Consumes rng; photons are thinned one Bernoulli at a time.
TrialResult simulate_trial(std::span<const double> prioritized_arms,
                           const DetectionStrategy& strategy, double v_d,
                           double lambda, SplitMix64& rng);

/// Repeat simulate_trial `trials` times, trial t on SplitMix64::substream(seed,
/// t). The substream mapping makes results independent of worker count and
/// chunking.
McEstimate run_trials(const SourceConfig& config, std::uint64_t trials,
                      std::uint64_t seed, int workers = 1);

/// Poisson sample by CDF inversion; intended for small means.
int sample_poisson(double lambda, SplitMix64& rng);

/// Binomial(n, p) sample as n Bernoulli draws.
int sample_binomial(int n, double p, SplitMix64& rng);

}  // namespace spsmux
