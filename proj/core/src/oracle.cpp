#include "spsmux/oracle.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "parallel_for.hpp"

namespace spsmux {

int sample_poisson(double lambda, SplitMix64& rng) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  const double u = rng.next_double();
  double p = std::exp(-lambda);
  double cum = p;
  int k = 0;
  while (u >= cum && k < kPoissonTruncationCap) {
    ++k;
    p *= lambda / k;
    cum += p;
  }
  return k;
}

int sample_binomial(int n, double p, SplitMix64& rng) {
  int c = 0;
  for (int k = 0; k < n; ++k) c += rng.next_double() < p ? 1 : 0;
  return c;
}

TrialResult simulate_trial(std::span<const double> prioritized_arms,
                           const DetectionStrategy& strategy, double v_d,
                           double lambda, SplitMix64& rng) {
  for (std::size_t n = 0; n < prioritized_arms.size(); ++n) {
    const int generated = sample_poisson(lambda, rng);
    const int detected = sample_binomial(generated, v_d, rng);
    if (strategy.accepts(detected)) {
      TrialResult r;
      r.heralded_unit = static_cast<int>(n) + 1;
      r.output_photons = sample_binomial(generated, prioritized_arms[n], rng);
      return r;
    }
  }
  return {};
}

McEstimate run_trials(const SourceConfig& config, std::uint64_t trials,
                      std::uint64_t seed, int workers) {
  config.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const auto arms = effective_prioritized_arms(config.topology, config.loss);
  const double v_d = config.loss.v_d;
  const double lambda = config.mean_photon_number;

  // Trials are grouped into fixed chunks purely to amortize the merge; each
  // trial runs on its own substream, so the outcome is chunking-independent.
  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;

  std::vector<std::uint64_t> counts;
  std::mutex merge_mutex;
  detail::parallel_for(chunks, workers, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min(trials, begin + kChunk);
    std::vector<std::uint64_t> local;
    for (std::uint64_t t = begin; t < end; ++t) {
      SplitMix64 rng = SplitMix64::substream(seed, t);
      const TrialResult r =
          simulate_trial(arms, config.strategy, v_d, lambda, rng);
      const auto i = static_cast<std::size_t>(r.output_photons);
      if (i >= local.size()) local.resize(i + 1, 0);
      ++local[i];
    }
    const std::lock_guard<std::mutex> lock(merge_mutex);
    if (counts.size() < local.size()) counts.resize(local.size(), 0);
    for (std::size_t i = 0; i < local.size(); ++i) counts[i] += local[i];
  });

  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.counts = std::move(counts);
  est.p_i_hat.resize(est.counts.size());
  est.std_err.resize(est.counts.size());
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < est.counts.size(); ++i) {
    const double p = static_cast<double>(est.counts[i]) / n;
    est.p_i_hat[i] = p;
    est.std_err[i] = std::sqrt(p * (1.0 - p) / n);
  }
  return est;
}

}  // namespace spsmux
