#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "spsmux/engine.hpp"
#include "spsmux/topology.hpp"

namespace spsmux {

/// Settings for the one-dimensional search over the input mean photon number.
/// A coarse pre-scan at coarse_step picks the best bracket, then golden-section
/// search refines inside [best - coarse_step, best + coarse_step].
struct LambdaSearch {
  double lambda_min = 1e-6;
  double lambda_max = 3.0;
  double coarse_step = 0.05;
  double tolerance = 1e-6;

  void validate() const;
};

/// Best operating point of a source with a fixed number of multiplexed units.
struct PerNOutcome {
  int n_units = 0;
  double lambda_opt = 0.0;
  double p1_achievable = 0.0;
};

/// Result of scanning the number of multiplexed units up to n_max.
struct OptimizationOutcome {
  TopologyKind kind = TopologyKind::Cbtm;
  std::vector<PerNOutcome> per_n;  // ascending in n_units
  int n_opt = 0;
  double lambda_opt = 0.0;
  double p1_max = 0.0;
};

/// Maximize the single-photon probability over the mean photon number for a
/// fixed prioritized arm list (highest transmission first, losses folded in).
PerNOutcome optimize_lambda_for_arms(std::span<const double> prioritized_arms,
                                     const DetectionStrategy& strategy,
                                     double v_d,
                                     const LambdaSearch& search = {});

PerNOutcome optimize_lambda(const TopologySpec& topology, const LossModel& loss,
                            const DetectionStrategy& strategy,
                            const LambdaSearch& search = {});

/// Scan unit counts 1..n_max (powers of two only for the complete tree) and
/// select the global optimum; ties go to the smaller unit count.
OptimizationOutcome optimize_n(TopologyKind kind, const LossModel& loss,
                               const DetectionStrategy& strategy, int n_max,
                               const LambdaSearch& search = {});

/// Loss-model field selectable as a sweep axis.
enum class LossParam { Vr, Vt, Vd, Vb };

std::string_view to_string(LossParam param);
LossParam parse_loss_param(std::string_view text);

/// Inclusive arithmetic progression start, start+step, ..., stop over one
/// loss-model field.
struct AxisSpec {
  LossParam param = LossParam::Vt;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  int points() const;
  double at(int k) const { return start + k * step; }
  void validate() const;
};

/// Cartesian grid: fixed base loss model plus one or two swept axes.
struct SweepGrid {
  LossModel base;
  std::vector<AxisSpec> axes;

  std::size_t size() const;
  void validate() const;
};

/// One side of a sweep comparison: which tree and which heralding strategy.
struct SourceChoice {
  TopologyKind kind = TopologyKind::Oibtm;
  DetectionStrategy strategy = DetectionStrategy::spd();
};

/// Fully optimized results for both sides at a single grid point.
/// delta_p and delta_n are side a minus side b.
struct SweepPoint {
  std::vector<double> coords;  // axis values, same order as SweepGrid::axes
  LossModel loss;
  double p1_a = 0.0;
  double p1_b = 0.0;
  int n_a = 0;
  int n_b = 0;
  double lambda_a = 0.0;
  double lambda_b = 0.0;

  double delta_p() const { return p1_a - p1_b; }
  int delta_n() const { return n_a - n_b; }
};

struct SweepResult {
  SweepGrid grid;
  std::vector<SweepPoint> points;  // row-major, last axis fastest
};

/// Evaluate optimize_n for both choices at every grid point. Points are
/// independent; workers > 1 evaluates them on that many threads, workers == 0
/// uses the hardware concurrency. Results are gathered by grid index, so the
/// outcome does not depend on scheduling.
SweepResult sweep_difference(const SweepGrid& grid, const SourceChoice& a,
                             const SourceChoice& b, int n_max, int workers = 1,
                             const LambdaSearch& search = {});

/// Same tree on both sides, different heralding strategies.
SweepResult compare_strategies(const SweepGrid& grid, TopologyKind kind,
                               const DetectionStrategy& s_a,
                               const DetectionStrategy& s_b, int n_max,
                               int workers = 1, const LambdaSearch& search = {});

}  // namespace spsmux
