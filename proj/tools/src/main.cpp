// Command line front end for the multiplexed single-photon source library.
// Every command emits CSV or JSON; when the result goes to a file, a
// <file>.manifest.json with the resolved parameters is written next to it.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spsmux/engine.hpp"
#include "spsmux/optimizer.hpp"
#include "spsmux/oracle.hpp"
#include "spsmux/topology.hpp"
#include "spsmux/version.hpp"

using nlohmann::json;

namespace {

std::string format_double(double v, bool paper_rounding) {
  char buf[40];
  std::snprintf(buf, sizeof buf, paper_rounding ? "%.3f" : "%.17g", v);
  return buf;
}

// Shortest representation that round-trips; used for grid coordinates so that
// 0.92 prints as "0.92" rather than its 17-digit expansion.
std::string format_param(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

std::string iso_timestamp() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// "-" sends the payload to stdout; anything else is a file path that also
// receives a sibling manifest.
void emit(const std::string& path, const std::string& payload,
          const std::string& command, const json& parameters,
          std::optional<std::uint64_t> seed = {}) {
  if (path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << payload;

  json manifest;
  manifest["command"] = command;
  manifest["parameters"] = parameters;
  manifest["library_version"] = std::string(spsmux::kVersion);
  if (seed) manifest["seed"] = *seed;
  manifest["timestamp"] = iso_timestamp();
  const std::string manifest_path = path + ".manifest.json";
  std::ofstream mout(manifest_path, std::ios::binary);
  if (!mout)
    throw std::runtime_error("cannot open manifest file: " + manifest_path);
  mout << manifest.dump(2) << "\n";
}

spsmux::DetectionStrategy parse_strategy(const std::string& text) {
  if (text == "spd") return spsmux::DetectionStrategy::spd();
  std::vector<int> accepted;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      accepted.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(
          "bad strategy '" + text +
          "' (expected 'spd' or comma separated positive integers)");
    }
    pos = comma + 1;
  }
  return spsmux::DetectionStrategy::accept(std::move(accepted));
}

spsmux::AxisSpec parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t colon = std::min(text.find(':', pos), text.size());
    parts.push_back(text.substr(pos, colon - pos));
    pos = colon + 1;
  }
  if (parts.size() != 4)
    throw std::invalid_argument("bad axis '" + text +
                                "' (expected param:start:stop:step)");
  spsmux::AxisSpec axis;
  axis.param = spsmux::parse_loss_param(parts[0]);
  try {
    axis.start = std::stod(parts[1]);
    axis.stop = std::stod(parts[2]);
    axis.step = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad axis '" + text +
                                "' (start/stop/step must be numbers)");
  }
  axis.validate();
  return axis;
}

struct LossFlags {
  double vr = 1.0;
  double vt = 1.0;
  double vd = 1.0;
  double vb = 1.0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--vr", vr, "router reflection efficiency")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--vt", vt, "router transmission efficiency")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--vd", vd, "detector efficiency")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--vb", vb, "general transmission coefficient")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }

  spsmux::LossModel model() const { return {vr, vt, vd, vb}; }

  json to_json() const {
    return json{{"vr", vr}, {"vt", vt}, {"vd", vd}, {"vb", vb}};
  }
};

struct ArmsOptions {
  std::string kind;
  int n = 1;
  LossFlags loss;
  bool symbolic = false;
  bool paper_rounding = false;
  std::string output = "-";
};

void run_arms(const ArmsOptions& opt) {
  const spsmux::TopologySpec spec{spsmux::parse_topology_kind(opt.kind), opt.n};
  const auto exponents = spsmux::arm_exponents(spec);
  const auto arms = spsmux::build_arm_transmissions(spec, opt.loss.model());

  std::vector<int> rank(arms.size());  // arm position (0-based) -> priority
  for (std::size_t k = 0; k < arms.size(); ++k)
    rank[arms.priority_to_position[k] - 1] = static_cast<int>(k) + 1;

  std::string csv = opt.symbolic ? "n,vr_exponent,vt_exponent,symbol,priority\n"
                                 : "n,vr_exponent,vt_exponent,v_n,priority\n";
  for (std::size_t k = 0; k < arms.size(); ++k) {
    csv += std::to_string(k + 1) + ',' + std::to_string(exponents[k].r) + ',' +
           std::to_string(exponents[k].t) + ',';
    csv += opt.symbolic
               ? exponents[k].token()
               : format_double(arms.positional[k], opt.paper_rounding);
    csv += ',' + std::to_string(rank[k]) + '\n';
  }

  json params{{"kind", to_string(spec.kind)},
              {"n", opt.n},
              {"loss", opt.loss.to_json()},
              {"symbolic", opt.symbolic},
              {"paper_rounding", opt.paper_rounding}};
  emit(opt.output, csv, "arms", params);
}

struct ProbOptions {
  std::string kind = "oibtm";
  int n = 1;
  LossFlags loss;
  std::string strategy = "1";
  double lambda = 1.0;
  int i_max = 5;
  bool paper_rounding = false;
  std::string output = "-";
};

void run_prob(const ProbOptions& opt) {
  spsmux::SourceConfig config;
  config.topology = {spsmux::parse_topology_kind(opt.kind), opt.n};
  config.loss = opt.loss.model();
  config.strategy = parse_strategy(opt.strategy);
  config.mean_photon_number = opt.lambda;

  const auto dist = spsmux::output_distribution(config, opt.i_max);
  std::string csv = "i,probability\n";
  for (int i = 0; i <= opt.i_max; ++i)
    csv += std::to_string(i) + ',' +
           format_double(dist.probabilities[i], opt.paper_rounding) + '\n';

  json params{{"kind", to_string(config.topology.kind)},
              {"n", opt.n},
              {"loss", opt.loss.to_json()},
              {"strategy", config.strategy.label()},
              {"lambda", opt.lambda},
              {"i_max", opt.i_max},
              {"l_max", dist.l_max},
              {"truncation_tail", dist.truncation_tail},
              {"paper_rounding", opt.paper_rounding}};
  emit(opt.output, csv, "prob", params);
}

struct OptimizeOptions {
  std::string kind = "oibtm";
  LossFlags loss;
  std::string strategy = "1";
  int n_max = 128;
  bool paper_rounding = false;
  std::string output = "-";
  std::string json_output;
};

json outcome_to_json(const spsmux::OptimizationOutcome& outcome,
                     const std::string& strategy_label) {
  json per_n = json::array();
  for (const auto& pn : outcome.per_n)
    per_n.push_back({{"n", pn.n_units},
                     {"lambda_opt", pn.lambda_opt},
                     {"p1_achievable", pn.p1_achievable}});
  return json{{"kind", to_string(outcome.kind)},
              {"strategy", strategy_label},
              {"n_opt", outcome.n_opt},
              {"lambda_opt", outcome.lambda_opt},
              {"p1_max", outcome.p1_max},
              {"per_n", per_n}};
}

void run_optimize(const OptimizeOptions& opt) {
  const auto kind = spsmux::parse_topology_kind(opt.kind);
  const auto strategy = parse_strategy(opt.strategy);
  const auto outcome =
      spsmux::optimize_n(kind, opt.loss.model(), strategy, opt.n_max);

  json params{{"kind", to_string(kind)},
              {"loss", opt.loss.to_json()},
              {"strategy", strategy.label()},
              {"n_max", opt.n_max},
              {"paper_rounding", opt.paper_rounding}};

  const json result = outcome_to_json(outcome, strategy.label());
  if (opt.output == "-" && opt.json_output.empty()) {
    std::cout << result.dump(2) << "\n";
    return;
  }
  if (opt.output != "-") {
    std::string csv = "n,lambda_opt,p1_achievable\n";
    for (const auto& pn : outcome.per_n)
      csv += std::to_string(pn.n_units) + ',' +
             format_double(pn.lambda_opt, opt.paper_rounding) + ',' +
             format_double(pn.p1_achievable, opt.paper_rounding) + '\n';
    emit(opt.output, csv, "optimize", params);
  }
  if (!opt.json_output.empty())
    emit(opt.json_output, result.dump(2) + "\n", "optimize", params);
}

struct SweepOptions {
  std::vector<std::string> axes;
  LossFlags loss;
  std::string minuend = "oibtm";
  std::string subtrahend = "cbtm";
  std::string minuend_strategy = "1";
  std::string subtrahend_strategy = "1";
  int n_max = 128;
  int workers = 0;
  bool paper_rounding = false;
  std::string output = "-";
};

void run_sweep(const SweepOptions& opt) {
  spsmux::SweepGrid grid;
  grid.base = opt.loss.model();
  for (const auto& text : opt.axes) grid.axes.push_back(parse_axis(text));

  const spsmux::SourceChoice a{spsmux::parse_topology_kind(opt.minuend),
                               parse_strategy(opt.minuend_strategy)};
  const spsmux::SourceChoice b{spsmux::parse_topology_kind(opt.subtrahend),
                               parse_strategy(opt.subtrahend_strategy)};
  const auto result =
      spsmux::sweep_difference(grid, a, b, opt.n_max, opt.workers);

  std::string csv;
  for (const auto& axis : grid.axes) {
    csv += to_string(axis.param);
    csv += ',';
  }
  csv +=
      "p1_minuend,n_minuend,lambda_minuend,"
      "p1_subtrahend,n_subtrahend,lambda_subtrahend,delta_p,delta_n\n";
  for (const auto& p : result.points) {
    for (double c : p.coords) csv += format_param(c) + ',';
    csv += format_double(p.p1_a, opt.paper_rounding) + ',' +
           std::to_string(p.n_a) + ',' +
           format_double(p.lambda_a, opt.paper_rounding) + ',' +
           format_double(p.p1_b, opt.paper_rounding) + ',' +
           std::to_string(p.n_b) + ',' +
           format_double(p.lambda_b, opt.paper_rounding) + ',' +
           format_double(p.delta_p(), opt.paper_rounding) + ',' +
           std::to_string(p.delta_n()) + '\n';
  }

  json axes = json::array();
  for (const auto& axis : grid.axes)
    axes.push_back({{"param", to_string(axis.param)},
                    {"start", axis.start},
                    {"stop", axis.stop},
                    {"step", axis.step}});
  json params{{"axes", axes},
              {"base_loss", opt.loss.to_json()},
              {"minuend", opt.minuend},
              {"minuend_strategy", a.strategy.label()},
              {"subtrahend", opt.subtrahend},
              {"subtrahend_strategy", b.strategy.label()},
              {"n_max", opt.n_max},
              {"workers", opt.workers},
              {"paper_rounding", opt.paper_rounding}};
  emit(opt.output, csv, "sweep", params);
}

struct Table1Options {
  double vb = 0.98;
  int n_max = 128;
  bool paper_rounding = false;
  std::string output = "-";
};

void run_table1(const Table1Options& opt) {
  const std::vector<double> vr_values{0.92, 0.97, 0.99};
  const std::vector<double> vd_values{0.8, 0.9, 0.95, 0.98};
  const std::vector<double> vt_values{0.9, 0.95, 0.985};

  std::string csv = "v_r,v_d,v_t,p1_max,n_opt,lambda_opt\n";
  for (double vr : vr_values)
    for (double vd : vd_values)
      for (double vt : vt_values) {
        const spsmux::LossModel loss{vr, vt, vd, opt.vb};
        const auto outcome =
            spsmux::optimize_n(spsmux::TopologyKind::Oibtm, loss,
                               spsmux::DetectionStrategy::spd(), opt.n_max);
        csv += format_param(vr) + ',' + format_param(vd) + ',' +
               format_param(vt) + ',' +
               format_double(outcome.p1_max, opt.paper_rounding) + ',' +
               std::to_string(outcome.n_opt) + ',' +
               format_double(outcome.lambda_opt, opt.paper_rounding) + '\n';
      }

  json params{{"vb", opt.vb},
              {"n_max", opt.n_max},
              {"paper_rounding", opt.paper_rounding}};
  emit(opt.output, csv, "table1", params);
}

struct McOptions {
  std::string kind = "oibtm";
  int n = 1;
  LossFlags loss;
  std::string strategy = "1";
  double lambda = 1.0;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string output = "-";
};

void run_mc(const McOptions& opt) {
  spsmux::SourceConfig config;
  config.topology = {spsmux::parse_topology_kind(opt.kind), opt.n};
  config.loss = opt.loss.model();
  config.strategy = parse_strategy(opt.strategy);
  config.mean_photon_number = opt.lambda;

  const auto est = spsmux::run_trials(config, opt.trials, opt.seed, opt.workers);
  const int i_max =
      std::max<int>(2, static_cast<int>(est.p_i_hat.size()) - 1);
  const auto dist = spsmux::output_distribution(config, i_max);

  json rows = json::array();
  for (int i = 0; i <= i_max; ++i) {
    const bool sampled = i < static_cast<int>(est.p_i_hat.size());
    const double p_hat = sampled ? est.p_i_hat[i] : 0.0;
    const double std_err = sampled ? est.std_err[i] : 0.0;
    const double p = dist.probabilities[i];
    const double sigma = std::max(
        {std_err, std::sqrt(p * (1.0 - p) / static_cast<double>(est.trials)),
         1e-300});
    rows.push_back({{"i", i},
                    {"count", sampled ? est.counts[i] : 0},
                    {"p_hat", p_hat},
                    {"std_err", std_err},
                    {"analytic", p},
                    {"sigma_distance", std::abs(p_hat - p) / sigma}});
  }
  json result{{"trials", est.trials},
              {"seed", est.seed},
              {"distribution", rows}};

  json params{{"kind", to_string(config.topology.kind)},
              {"n", opt.n},
              {"loss", opt.loss.to_json()},
              {"strategy", config.strategy.label()},
              {"lambda", opt.lambda},
              {"trials", opt.trials},
              {"workers", opt.workers}};
  emit(opt.output, result.dump(2) + "\n", "mc", params, opt.seed);
}

void add_output_option(CLI::App& cmd, std::string& output) {
  cmd.add_option("-o,--output", output,
                 "output file ('-' prints to stdout, files get a "
                 ".manifest.json sibling)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Single-photon source multiplexing calculator: arm transmissions, "
      "output statistics, and two-stage optimization for complete and "
      "incomplete binary-tree multiplexers"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "read options from an INI file (flags win on conflict)");
  app.set_version_flag("--version", std::string(spsmux::kVersion));

  ArmsOptions arms;
  auto* arms_cmd = app.add_subcommand(
      "arms", "Per-arm total transmission coefficients of a multiplexer");
  arms_cmd->add_option("--kind", arms.kind, "cbtm, iibtm or oibtm")
      ->required();
  arms_cmd->add_option("--n", arms.n, "number of multiplexed units")
      ->required()
      ->check(CLI::PositiveNumber);
  arms.loss.attach(*arms_cmd);
  arms_cmd->add_flag("--symbolic", arms.symbolic,
                     "print Vr^a*Vt^b tokens instead of numeric values");
  arms_cmd->add_flag("--paper-rounding", arms.paper_rounding,
                     "round probabilities to 3 decimals");
  add_output_option(*arms_cmd, arms.output);
  arms_cmd->callback([&] { run_arms(arms); });

  ProbOptions prob;
  auto* prob_cmd = app.add_subcommand(
      "prob", "Output photon number distribution of a configured source");
  prob_cmd->add_option("--kind", prob.kind, "cbtm, iibtm or oibtm")
      ->capture_default_str();
  prob_cmd->add_option("--n", prob.n, "number of multiplexed units")
      ->required()
      ->check(CLI::PositiveNumber);
  prob.loss.attach(*prob_cmd);
  prob_cmd
      ->add_option("--strategy", prob.strategy,
                   "accepted detected photon numbers, e.g. '1' or '1,2'")
      ->capture_default_str();
  prob_cmd->add_option("--lambda", prob.lambda, "input mean photon number")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  prob_cmd->add_option("--i-max", prob.i_max, "largest photon number to print")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  prob_cmd->add_flag("--paper-rounding", prob.paper_rounding,
                     "round probabilities to 3 decimals");
  add_output_option(*prob_cmd, prob.output);
  prob_cmd->callback([&] { run_prob(prob); });

  OptimizeOptions optimize;
  auto* opt_cmd = app.add_subcommand(
      "optimize",
      "Optimal mean photon number per unit count and the best unit count");
  opt_cmd->add_option("--kind", optimize.kind, "cbtm, iibtm or oibtm")
      ->capture_default_str();
  optimize.loss.attach(*opt_cmd);
  opt_cmd
      ->add_option("--strategy", optimize.strategy,
                   "accepted detected photon numbers")
      ->capture_default_str();
  opt_cmd->add_option("--n-max", optimize.n_max, "largest unit count to scan")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  opt_cmd->add_flag("--paper-rounding", optimize.paper_rounding,
                    "round probabilities to 3 decimals");
  add_output_option(*opt_cmd, optimize.output);
  opt_cmd->add_option("--json", optimize.json_output,
                      "also write the full outcome as JSON to this file");
  opt_cmd->callback([&] { run_optimize(optimize); });

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand(
      "sweep",
      "Difference of optimized single-photon probabilities on a loss grid");
  sweep_cmd
      ->add_option("--axis", sweep.axes,
                   "swept parameter as param:start:stop:step (repeat for a "
                   "second axis)")
      ->required()
      ->expected(1, 2);
  sweep.loss.attach(*sweep_cmd);
  sweep_cmd->add_option("--minuend", sweep.minuend, "kind of the first source")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--subtrahend", sweep.subtrahend,
                   "kind of the second source")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--minuend-strategy", sweep.minuend_strategy,
                   "strategy of the first source")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--subtrahend-strategy", sweep.subtrahend_strategy,
                   "strategy of the second source")
      ->capture_default_str();
  sweep_cmd->add_option("--n-max", sweep.n_max, "largest unit count to scan")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd
      ->add_option("--workers", sweep.workers,
                   "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sweep_cmd->add_flag("--paper-rounding", sweep.paper_rounding,
                      "round probabilities to 3 decimals");
  add_output_option(*sweep_cmd, sweep.output);
  sweep_cmd->callback([&] { run_sweep(sweep); });

  Table1Options table1;
  auto* table1_cmd = app.add_subcommand(
      "table1",
      "Optimized operating points over the published grid of efficiencies");
  table1_cmd->add_option("--vb", table1.vb, "general transmission coefficient")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  table1_cmd
      ->add_option("--n-max", table1.n_max, "largest unit count to scan")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  table1_cmd->add_flag("--paper-rounding", table1.paper_rounding,
                       "round probabilities to 3 decimals");
  add_output_option(*table1_cmd, table1.output);
  table1_cmd->callback([&] { run_table1(table1); });

  McOptions mc;
  auto* mc_cmd = app.add_subcommand(
      "mc", "Monte Carlo estimate of the output distribution vs the "
            "analytic model");
  mc_cmd->add_option("--kind", mc.kind, "cbtm, iibtm or oibtm")
      ->capture_default_str();
  mc_cmd->add_option("--n", mc.n, "number of multiplexed units")
      ->required()
      ->check(CLI::PositiveNumber);
  mc.loss.attach(*mc_cmd);
  mc_cmd
      ->add_option("--strategy", mc.strategy,
                   "accepted detected photon numbers")
      ->capture_default_str();
  mc_cmd->add_option("--lambda", mc.lambda, "input mean photon number")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  mc_cmd->add_option("--trials", mc.trials, "number of simulated pulses")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc_cmd->add_option("--seed", mc.seed, "base seed for the trial substreams")
      ->capture_default_str();
  mc_cmd->add_option("--workers", mc.workers, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_output_option(*mc_cmd, mc.output);
  mc_cmd->callback([&] { run_mc(mc); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
