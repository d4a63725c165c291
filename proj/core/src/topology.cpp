#include "spsmux/topology.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace spsmux {

namespace {

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

// floor(log2(n)) for n >= 1, exact in integer arithmetic
int floor_log2(int n) { return std::bit_width(static_cast<unsigned>(n)) - 1; }

// ceil(log2(n)) for n >= 1
int ceil_log2(int n) {
  return n <= 1 ? 0 : std::bit_width(static_cast<unsigned>(n - 1));
}

double pow_int(double base, int exp) {
  double r = 1.0;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

std::vector<double> evaluate(const std::vector<ArmExponents>& exps,
                             const LossModel& loss) {
  std::vector<double> out;
  out.reserve(exps.size());
  for (const auto& e : exps) out.push_back(e.value(loss.v_r, loss.v_t));
  return out;
}

}  // namespace

void LossModel::validate() const {
  check_probability(v_r, "v_r");
  check_probability(v_t, "v_t");
  check_probability(v_d, "v_d");
  check_probability(v_b, "v_b");
}

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Cbtm: return "cbtm";
    case TopologyKind::Iibtm: return "iibtm";
    case TopologyKind::Oibtm: return "oibtm";
  }
  return "?";
}

TopologyKind parse_topology_kind(std::string_view name) {
  if (name == "cbtm" || name == "sym") return TopologyKind::Cbtm;
  if (name == "iibtm" || name == "in") return TopologyKind::Iibtm;
  if (name == "oibtm" || name == "out") return TopologyKind::Oibtm;
  throw std::invalid_argument("unknown multiplexer kind: " + std::string(name) +
                              " (expected cbtm, iibtm or oibtm)");
}

void TopologySpec::validate() const {
  if (n_units < 1) throw std::invalid_argument("n_units must be >= 1");
  if (kind == TopologyKind::Cbtm && !is_power_of_two(n_units))
    throw std::invalid_argument(
        "a complete binary-tree multiplexer requires a power-of-two number "
        "of units");
}

double ArmExponents::value(double v_r, double v_t) const noexcept {
  return pow_int(v_r, r) * pow_int(v_t, t);
}

std::string ArmExponents::token() const {
  if (r == 0 && t == 0) return "1";
  std::string s;
  if (r > 0) {
    s += "Vr";
    if (r > 1) s += "^" + std::to_string(r);
  }
  if (t > 0) {
    if (!s.empty()) s += "*";
    s += "Vt";
    if (t > 1) s += "^" + std::to_string(t);
  }
  return s;
}

int hamming_weight(std::uint64_t x) noexcept { return std::popcount(x); }

bool is_power_of_two(int n) noexcept {
  return n > 0 && std::has_single_bit(static_cast<unsigned>(n));
}

std::vector<ArmExponents> arm_exponents_cbtm(int levels) {
  if (levels < 0 || levels > 30)
    throw std::invalid_argument("levels must lie in [0, 30]");
  const int n_units = 1 << levels;
  std::vector<ArmExponents> out;
  out.reserve(n_units);
  for (int n = 1; n <= n_units; ++n) {
    const int h = hamming_weight(static_cast<std::uint64_t>(n - 1));
    out.push_back({levels - h, h});
  }
  return out;
}

std::vector<ArmExponents> arm_exponents_iibtm(int n_units) {
  if (n_units < 1) throw std::invalid_argument("n_units must be >= 1");
  if (n_units == 1) return {ArmExponents{0, 0}};

  const int m1 = floor_log2(n_units);       // levels of the initial tree
  const int n1 = 2 * (n_units - (1 << m1)); // inputs on the deepest level

  std::vector<ArmExponents> out;
  out.reserve(n_units);
  for (int n = 1; n <= n_units; ++n) {
    if (n <= n1) {
      const int h = hamming_weight(static_cast<std::uint64_t>(n - 1));
      out.push_back({m1 + 1 - h, h});
    } else {
      const int h =
          hamming_weight(static_cast<std::uint64_t>(n - n1 / 2 - 1));
      out.push_back({m1 - h, h});
    }
  }
  return out;
}

std::vector<ArmExponents> arm_exponents_oibtm(int n_units) {
  if (n_units < 1) throw std::invalid_argument("n_units must be >= 1");
  if (n_units == 1) return {ArmExponents{0, 0}};

  const int m2 = ceil_log2(n_units);     // levels on the complete branch
  const int n2 = 1 << (m2 - 1);          // inputs of the initial tree
  const int m3 = floor_log2(n_units - n2);  // finished levels, new branch
  const int n4 = 1 << m3;
  const int n3 = 2 * (n_units - n2 - n4);   // inputs on the level under way

  std::vector<ArmExponents> out;
  out.reserve(n_units);
  for (int n = 1; n <= n_units; ++n) {
    if (n <= n2) {
      const int h = hamming_weight(static_cast<std::uint64_t>(n - 1));
      out.push_back({m2 - h, h});
    } else if (n <= n2 + n3) {
      // arm enters a freshly added router, then the complete subtree and
      // the transmitting input of the output router
      const int h = hamming_weight(static_cast<std::uint64_t>(n - n2 - 1));
      out.push_back({m3 + 1 - h, h + 1});
    } else {
      const int h =
          hamming_weight(static_cast<std::uint64_t>(n - n2 - n3 / 2 - 1));
      out.push_back({m3 - h, h + 1});
    }
  }
  return out;
}

std::vector<ArmExponents> arm_exponents(const TopologySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case TopologyKind::Cbtm:
      return arm_exponents_cbtm(floor_log2(spec.n_units));
    case TopologyKind::Iibtm:
      return arm_exponents_iibtm(spec.n_units);
    case TopologyKind::Oibtm:
      return arm_exponents_oibtm(spec.n_units);
  }
  throw std::invalid_argument("unknown topology kind");
}

std::vector<double> arms_cbtm(int levels, const LossModel& loss) {
  loss.validate();
  return evaluate(arm_exponents_cbtm(levels), loss);
}

std::vector<double> arms_iibtm(int n_units, const LossModel& loss) {
  loss.validate();
  return evaluate(arm_exponents_iibtm(n_units), loss);
}

std::vector<double> arms_oibtm(int n_units, const LossModel& loss) {
  loss.validate();
  return evaluate(arm_exponents_oibtm(n_units), loss);
}

ArmTransmissions build_arm_transmissions(const TopologySpec& spec,
                                         const LossModel& loss) {
  loss.validate();
  ArmTransmissions out;
  out.positional = evaluate(arm_exponents(spec), loss);

  std::vector<int> order(out.positional.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out.positional[a] > out.positional[b];
  });

  out.prioritized.reserve(order.size());
  out.priority_to_position.reserve(order.size());
  for (int idx : order) {
    out.prioritized.push_back(out.positional[idx]);
    out.priority_to_position.push_back(idx + 1);
  }
  return out;
}

}  // namespace spsmux
