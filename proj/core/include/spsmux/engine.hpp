#pragma once

#include <span>
#include <string>
#include <vector>

#include "spsmux/topology.hpp"

namespace spsmux {

// Generation beyond this Poisson tail mass is truncated away.
inline constexpr double kPoissonTailBound = 1e-12;
inline constexpr int kPoissonTruncationCap = 200;

/// Set S of detected idler photon numbers that open the multiplexer input,
/// bounded by the resolving limit J_b of the heralding detector.
struct DetectionStrategy {
  std::vector<int> accepted;  ///< strictly ascending, every element >= 1
  int boundary = 1;           ///< J_b, at least max(accepted)

  /// Single-photon detection: S = {1}.
  static DetectionStrategy spd();
  /// Threshold-like strategy S = {1, ..., j_b}.
  static DetectionStrategy accept_up_to(int j_b);
  /// Arbitrary set; boundary defaults to max(s).
  static DetectionStrategy accept(std::vector<int> s);

  bool accepts(int j) const noexcept;
  std::string label() const;  ///< "{1}", "{1,2}", ...
  void validate() const;
};

/// Everything needed to evaluate the output statistics of one source.
struct SourceConfig {
  TopologySpec topology;
  LossModel loss;
  DetectionStrategy strategy = DetectionStrategy::spd();
  double mean_photon_number = 0.0;  ///< lambda, photon pairs per unit per pulse

  void validate() const;
};

/// Output photon-number distribution P_i for i = 0..i_max.
struct OutputDistribution {
  std::vector<double> probabilities;
  double truncation_tail = 0.0;  ///< Poisson mass beyond l_max, dropped
  int l_max = 0;                 ///< generated-photon truncation point
};

/// lambda^l e^{-lambda} / l!, by multiplicative recurrence from e^{-lambda}.
double poisson_pmf(int l, double lambda);

/// Smallest l_max whose Poisson tail mass is below kPoissonTailBound,
/// capped at kPoissonTruncationCap.
int poisson_truncation_length(double lambda);

/// P(detect j | l generated) = C(l,j) v_d^j (1-v_d)^(l-j). Requires j <= l.
double detect_given_generated(int j, int l, double v_d);

/// P(detect j) summed over generation up to l_max. For a Poisson source this
/// equals the thinned Poisson pmf (lambda*v_d)^j e^(-lambda*v_d) / j!.
double detect_marginal(int j, double lambda, double v_d, int l_max);

/// P(i photons reach the output | l entered an arm of transmission v_n).
/// Requires i <= l.
double transmit_given_entered(int i, int l, double v_n);

/// Total arm transmission: the general coefficient v_b applied on top of the
/// geometric router product.
double effective_arm(double v_geometric, double v_b);

/// Full output distribution of the configured source for i = 0..i_max.
/// P_0 includes the no-heralding term.
OutputDistribution output_distribution(const SourceConfig& config, int i_max);

/// Same computation on prebuilt total arm transmissions, highest first.
/// The arms are expected to already include v_b.
OutputDistribution output_distribution_for_arms(
    std::span<const double> prioritized_arms, const DetectionStrategy& strategy,
    double v_d, double lambda, int i_max);

double single_photon_probability(const SourceConfig& config);
double single_photon_probability_for_arms(
    std::span<const double> prioritized_arms, const DetectionStrategy& strategy,
    double v_d, double lambda);

/// Prioritized total arm transmissions (v_b included) for a geometry; the
/// form consumed by the *_for_arms evaluators and by the simulator.
std::vector<double> effective_prioritized_arms(const TopologySpec& spec,
                                               const LossModel& loss);

}  // namespace spsmux
