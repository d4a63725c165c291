#include "spsmux/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "parallel_for.hpp"
#include "spsmux/golden.hpp"

namespace spsmux {

namespace {

void set_param(LossModel& loss, LossParam param, double value) {
  switch (param) {
    case LossParam::Vr: loss.v_r = value; break;
    case LossParam::Vt: loss.v_t = value; break;
    case LossParam::Vd: loss.v_d = value; break;
    case LossParam::Vb: loss.v_b = value; break;
  }
}

}  // namespace

void LambdaSearch::validate() const {
  if (!(lambda_min > 0.0 && lambda_min < lambda_max))
    throw std::invalid_argument("need 0 < lambda_min < lambda_max");
  if (!(coarse_step > 0.0 && coarse_step <= lambda_max))
    throw std::invalid_argument("coarse_step must lie in (0, lambda_max]");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("tolerance must be positive");
}

PerNOutcome optimize_lambda_for_arms(std::span<const double> prioritized_arms,
                                     const DetectionStrategy& strategy,
                                     double v_d, const LambdaSearch& search) {
  search.validate();
  if (prioritized_arms.empty())
    throw std::invalid_argument("need at least one multiplexed unit");
  auto p1 = [&](double lambda) {
    return single_photon_probability_for_arms(prioritized_arms, strategy, v_d,
                                              lambda);
  };

  // Coarse pass at lambda = coarse_step * k to find the bracket; the grid is
  // derived from the index so repeated addition cannot drift.
  const int coarse_count =
      static_cast<int>(std::floor(search.lambda_max / search.coarse_step + 1e-9));
  double best_lambda = search.coarse_step;
  double best_value = -1.0;
  for (int k = 1; k <= coarse_count; ++k) {
    const double lambda = search.coarse_step * k;
    const double value = p1(lambda);
    if (value > best_value) {
      best_value = value;
      best_lambda = lambda;
    }
  }

  const double lo = std::max(search.lambda_min, best_lambda - search.coarse_step);
  const double hi = std::min(search.lambda_max, best_lambda + search.coarse_step);
  const GoldenResult refined = golden_section_maximize(p1, lo, hi, search.tolerance);

  PerNOutcome out;
  out.n_units = static_cast<int>(prioritized_arms.size());
  if (refined.value >= best_value) {
    out.lambda_opt = refined.x;
    out.p1_achievable = refined.value;
  } else {
    out.lambda_opt = best_lambda;
    out.p1_achievable = best_value;
  }
  return out;
}

PerNOutcome optimize_lambda(const TopologySpec& topology, const LossModel& loss,
                            const DetectionStrategy& strategy,
                            const LambdaSearch& search) {
  topology.validate();
  loss.validate();
  const auto arms = effective_prioritized_arms(topology, loss);
  return optimize_lambda_for_arms(arms, strategy, loss.v_d, search);
}

OptimizationOutcome optimize_n(TopologyKind kind, const LossModel& loss,
                               const DetectionStrategy& strategy, int n_max,
                               const LambdaSearch& search) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  loss.validate();
  strategy.validate();
  OptimizationOutcome out;
  out.kind = kind;
  for (int n = 1; n <= n_max; ++n) {
    if (kind == TopologyKind::Cbtm &&
        !is_power_of_two(static_cast<std::uint64_t>(n)))
      continue;
    const TopologySpec spec{kind, n};
    const auto arms = effective_prioritized_arms(spec, loss);
    out.per_n.push_back(
        optimize_lambda_for_arms(arms, strategy, loss.v_d, search));
  }
  out.n_opt = out.per_n.front().n_units;
  out.lambda_opt = out.per_n.front().lambda_opt;
  out.p1_max = out.per_n.front().p1_achievable;
  for (const PerNOutcome& pn : out.per_n) {
    if (pn.p1_achievable > out.p1_max) {
      out.p1_max = pn.p1_achievable;
      out.n_opt = pn.n_units;
      out.lambda_opt = pn.lambda_opt;
    }
  }
  return out;
}

std::string_view to_string(LossParam param) {
  switch (param) {
    case LossParam::Vr: return "vr";
    case LossParam::Vt: return "vt";
    case LossParam::Vd: return "vd";
    case LossParam::Vb: return "vb";
  }
  throw std::invalid_argument("unknown loss parameter");
}

LossParam parse_loss_param(std::string_view text) {
  if (text == "vr" || text == "Vr" || text == "v_r") return LossParam::Vr;
  if (text == "vt" || text == "Vt" || text == "v_t") return LossParam::Vt;
  if (text == "vd" || text == "Vd" || text == "v_d") return LossParam::Vd;
  if (text == "vb" || text == "Vb" || text == "v_b") return LossParam::Vb;
  throw std::invalid_argument("unknown loss parameter: " + std::string(text) +
                              " (expected one of vr, vt, vd, vb)");
}

int AxisSpec::points() const {
  validate();
  return 1 + static_cast<int>(std::floor((stop - start) / step + 1e-9));
}

void AxisSpec::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("axis step must be positive");
  if (!(start >= 0.0 && stop <= 1.0 && start <= stop))
    throw std::invalid_argument("axis range must satisfy 0 <= start <= stop <= 1");
}

std::size_t SweepGrid::size() const {
  std::size_t n = 1;
  for (const AxisSpec& axis : axes) n *= static_cast<std::size_t>(axis.points());
  return n;
}

void SweepGrid::validate() const {
  base.validate();
  if (axes.empty() || axes.size() > 2)
    throw std::invalid_argument("sweep needs one or two axes");
  for (const AxisSpec& axis : axes) axis.validate();
  if (axes.size() == 2 && axes[0].param == axes[1].param)
    throw std::invalid_argument("sweep axes must vary different parameters");
}

SweepResult sweep_difference(const SweepGrid& grid, const SourceChoice& a,
                             const SourceChoice& b, int n_max, int workers,
                             const LambdaSearch& search) {
  grid.validate();
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  a.strategy.validate();
  b.strategy.validate();
  search.validate();

  SweepResult result;
  result.grid = grid;
  result.points.resize(grid.size());

  detail::parallel_for(result.points.size(), workers, [&](std::size_t idx) {
    LossModel loss = grid.base;
    std::vector<double> coords(grid.axes.size());
    std::size_t rem = idx;
    for (std::size_t ax = grid.axes.size(); ax-- > 0;) {
      const AxisSpec& axis = grid.axes[ax];
      const int count = axis.points();
      const double value = axis.at(static_cast<int>(rem % count));
      rem /= count;
      coords[ax] = value;
      set_param(loss, axis.param, value);
    }

    const OptimizationOutcome ra = optimize_n(a.kind, loss, a.strategy, n_max, search);
    const OptimizationOutcome rb = optimize_n(b.kind, loss, b.strategy, n_max, search);

    SweepPoint& p = result.points[idx];
    p.coords = std::move(coords);
    p.loss = loss;
    p.p1_a = ra.p1_max;
    p.n_a = ra.n_opt;
    p.lambda_a = ra.lambda_opt;
    p.p1_b = rb.p1_max;
    p.n_b = rb.n_opt;
    p.lambda_b = rb.lambda_opt;
  });
  return result;
}

SweepResult compare_strategies(const SweepGrid& grid, TopologyKind kind,
                               const DetectionStrategy& s_a,
                               const DetectionStrategy& s_b, int n_max,
                               int workers, const LambdaSearch& search) {
  return sweep_difference(grid, SourceChoice{kind, s_a},
                          SourceChoice{kind, s_b}, n_max, workers, search);
}

}  // namespace spsmux
