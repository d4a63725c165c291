#include "spsmux/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spsmux {

namespace {

double pow_int(double base, int exp) {
  double r = 1.0;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

// C(l,k) v^k (1-v)^(l-k) evaluated directly; k <= l
double binomial_pmf(int k, int l, double v) {
  double c = 1.0;
  for (int m = 0; m < k; ++m) c = c * static_cast<double>(l - m) / (m + 1);
  return c * pow_int(v, k) * pow_int(1.0 - v, l - k);
}

struct HeraldContext {
  int l_max;
  double tail;  // Poisson mass beyond l_max
  double idle;  // per-unit probability of not heralding
};

// Fills weight[l] = P(generate l) * P(detected count lands in the accepted
// set | l) for l = 0..l_max, using pmf as the Poisson table.
HeraldContext build_herald(const DetectionStrategy& strategy, double v_d,
                           double lambda, std::vector<double>& pmf,
                           std::vector<double>& weight) {
  HeraldContext ctx{};
  ctx.l_max = poisson_truncation_length(lambda);

  pmf.assign(ctx.l_max + 1, 0.0);
  pmf[0] = std::exp(-lambda);
  double cum = pmf[0];
  for (int l = 1; l <= ctx.l_max; ++l) {
    pmf[l] = pmf[l - 1] * lambda / l;
    cum += pmf[l];
  }
  ctx.tail = std::max(0.0, 1.0 - cum);

  weight.assign(ctx.l_max + 1, 0.0);
  double herald_prob = 0.0;
  for (int j : strategy.accepted) {
    if (j > ctx.l_max) break;
    double cond = pow_int(v_d, j);  // P(detect j | l), advanced from l = j
    for (int l = j; l <= ctx.l_max; ++l) {
      const double term = cond * pmf[l];
      weight[l] += term;
      herald_prob += term;
      cond *= (1.0 - v_d) * static_cast<double>(l + 1) / (l + 1 - j);
    }
  }
  ctx.idle = std::clamp(1.0 - herald_prob, 0.0, 1.0);
  return ctx;
}

}  // namespace

DetectionStrategy DetectionStrategy::spd() { return {{1}, 1}; }

DetectionStrategy DetectionStrategy::accept_up_to(int j_b) {
  if (j_b < 1) throw std::invalid_argument("boundary must be >= 1");
  DetectionStrategy s;
  s.accepted.resize(j_b);
  for (int j = 1; j <= j_b; ++j) s.accepted[j - 1] = j;
  s.boundary = j_b;
  return s;
}

DetectionStrategy DetectionStrategy::accept(std::vector<int> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  DetectionStrategy out;
  out.accepted = std::move(s);
  out.boundary = out.accepted.empty() ? 1 : out.accepted.back();
  out.validate();
  return out;
}

bool DetectionStrategy::accepts(int j) const noexcept {
  return std::binary_search(accepted.begin(), accepted.end(), j);
}

std::string DetectionStrategy::label() const {
  std::string s = "{";
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    if (k > 0) s += ",";
    s += std::to_string(accepted[k]);
  }
  return s + "}";
}

void DetectionStrategy::validate() const {
  if (accepted.empty())
    throw std::invalid_argument(
        "detection strategy must accept at least one photon number");
  int prev = 0;
  for (int j : accepted) {
    if (j <= prev)
      throw std::invalid_argument(
          "accepted photon numbers must be strictly ascending positive "
          "integers");
    prev = j;
  }
  if (boundary < accepted.back())
    throw std::invalid_argument("boundary must be >= max(accepted)");
}

void SourceConfig::validate() const {
  topology.validate();
  loss.validate();
  strategy.validate();
  if (!(mean_photon_number >= 0.0))
    throw std::invalid_argument("mean photon number must be >= 0");
}

double poisson_pmf(int l, double lambda) {
  if (l < 0) throw std::invalid_argument("l must be >= 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  double p = std::exp(-lambda);
  for (int k = 1; k <= l; ++k) p *= lambda / k;
  return p;
}

int poisson_truncation_length(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  double p = std::exp(-lambda);
  double cum = p;
  int l = 0;
  while (1.0 - cum >= kPoissonTailBound && l < kPoissonTruncationCap) {
    ++l;
    p *= lambda / l;
    cum += p;
  }
  return l;
}

double detect_given_generated(int j, int l, double v_d) {
  if (j < 0 || l < 0 || j > l) throw std::invalid_argument("need 0 <= j <= l");
  if (!(v_d >= 0.0 && v_d <= 1.0))
    throw std::invalid_argument("v_d must lie in [0, 1]");
  return binomial_pmf(j, l, v_d);
}

double detect_marginal(int j, double lambda, double v_d, int l_max) {
  if (j < 1) throw std::invalid_argument("j must be >= 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(v_d >= 0.0 && v_d <= 1.0))
    throw std::invalid_argument("v_d must lie in [0, 1]");
  double pois = poisson_pmf(j, lambda);
  double cond = pow_int(v_d, j);  // P(detect j | l) at l = j
  double total = 0.0;
  for (int l = j; l <= l_max; ++l) {
    total += cond * pois;
    pois *= lambda / (l + 1);
    cond *= (1.0 - v_d) * static_cast<double>(l + 1) / (l + 1 - j);
  }
  return total;
}

double transmit_given_entered(int i, int l, double v_n) {
  if (i < 0 || l < 0 || i > l) throw std::invalid_argument("need 0 <= i <= l");
  if (!(v_n >= 0.0 && v_n <= 1.0))
    throw std::invalid_argument("v_n must lie in [0, 1]");
  return binomial_pmf(i, l, v_n);
}

double effective_arm(double v_geometric, double v_b) {
  if (!(v_geometric >= 0.0 && v_geometric <= 1.0) ||
      !(v_b >= 0.0 && v_b <= 1.0))
    throw std::invalid_argument("transmissions must lie in [0, 1]");
  return v_b * v_geometric;
}

std::vector<double> effective_prioritized_arms(const TopologySpec& spec,
                                               const LossModel& loss) {
  auto arms = build_arm_transmissions(spec, loss);
  std::vector<double> out = std::move(arms.prioritized);
  for (double& v : out) v *= loss.v_b;
  return out;
}

OutputDistribution output_distribution_for_arms(
    std::span<const double> prioritized_arms, const DetectionStrategy& strategy,
    double v_d, double lambda, int i_max) {
  if (prioritized_arms.empty())
    throw std::invalid_argument("need at least one multiplexed unit");
  if (i_max < 0) throw std::invalid_argument("i_max must be >= 0");
  if (!(v_d >= 0.0 && v_d <= 1.0))
    throw std::invalid_argument("v_d must lie in [0, 1]");
  strategy.validate();

  std::vector<double> pmf;
  std::vector<double> weight;
  const HeraldContext ctx = build_herald(strategy, v_d, lambda, pmf, weight);

  const int n_units = static_cast<int>(prioritized_arms.size());
  OutputDistribution out;
  out.l_max = ctx.l_max;
  out.truncation_tail = ctx.tail;
  out.probabilities.assign(i_max + 1, 0.0);
  out.probabilities[0] = std::pow(ctx.idle, n_units);  // no unit heralded

  for (int i = 0; i <= std::min(i_max, ctx.l_max); ++i) {
    double acc = 0.0;
    double idle_pow = 1.0;  // idle^(rank-1): all better units stayed silent
    for (int n = 0; n < n_units; ++n) {
      const double v_n = prioritized_arms[n];
      const double miss = 1.0 - v_n;
      // C(l,i) v_n^i miss^(l-i), advanced in l starting from l = i
      double trans = pow_int(v_n, i);
      double inner = 0.0;
      for (int l = i; l <= ctx.l_max; ++l) {
        inner += weight[l] * trans;
        trans *= miss * static_cast<double>(l + 1) / (l + 1 - i);
      }
      acc += idle_pow * inner;
      idle_pow *= ctx.idle;
    }
    out.probabilities[i] += acc;
  }
  return out;
}

OutputDistribution output_distribution(const SourceConfig& config, int i_max) {
  config.validate();
  const auto arms = effective_prioritized_arms(config.topology, config.loss);
  return output_distribution_for_arms(arms, config.strategy, config.loss.v_d,
                                      config.mean_photon_number, i_max);
}

double single_photon_probability_for_arms(
    std::span<const double> prioritized_arms, const DetectionStrategy& strategy,
    double v_d, double lambda) {
  if (prioritized_arms.empty())
    throw std::invalid_argument("need at least one multiplexed unit");
  if (!(v_d >= 0.0 && v_d <= 1.0))
    throw std::invalid_argument("v_d must lie in [0, 1]");
  strategy.validate();

  // Optimization hot path: reuse per-thread tables and evaluate only i = 1.
  thread_local std::vector<double> pmf;
  thread_local std::vector<double> weight;
  const HeraldContext ctx = build_herald(strategy, v_d, lambda, pmf, weight);

  double acc = 0.0;
  double idle_pow = 1.0;
  for (const double v_n : prioritized_arms) {
    const double miss = 1.0 - v_n;
    double trans = v_n;  // C(l,1) v_n (1-v_n)^(l-1) at l = 1
    double inner = 0.0;
    for (int l = 1; l <= ctx.l_max; ++l) {
      inner += weight[l] * trans;
      trans *= miss * static_cast<double>(l + 1) / l;
    }
    acc += idle_pow * inner;
    idle_pow *= ctx.idle;
  }
  return acc;
}

double single_photon_probability(const SourceConfig& config) {
  config.validate();
  const auto arms = effective_prioritized_arms(config.topology, config.loss);
  return single_photon_probability_for_arms(arms, config.strategy,
                                            config.loss.v_d,
                                            config.mean_photon_number);
}

}  // namespace spsmux
