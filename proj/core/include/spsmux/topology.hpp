#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spsmux {

/// Efficiencies characterizing the optical elements of a multiplexed
/// single-photon source. All four values are probabilities in [0, 1].
struct LossModel {
  double v_r = 1.0;  ///< router reflection efficiency (left input)
  double v_t = 1.0;  ///< router transmission efficiency (right input)
  double v_d = 1.0;  ///< heralding detector efficiency
  double v_b = 1.0;  ///< general transmission coefficient

  /// Throws std::invalid_argument unless every field lies in [0, 1].
  void validate() const;
};

/// Multiplexer geometry family.
///
/// Cbtm is the complete binary tree (N restricted to powers of two).
/// Iibtm extends a complete tree by appending routers at its inputs;
/// Oibtm couples a complete tree into one input of a new output router
/// and grows the sibling branch. Both accept arbitrary N.
enum class TopologyKind { Cbtm, Iibtm, Oibtm };

std::string_view to_string(TopologyKind kind);

/// Accepts "cbtm"/"sym", "iibtm"/"in", "oibtm"/"out"; throws
/// std::invalid_argument for anything else.
TopologyKind parse_topology_kind(std::string_view name);

/// A multiplexer geometry: kind plus the number of multiplexed units N.
struct TopologySpec {
  TopologyKind kind = TopologyKind::Cbtm;
  int n_units = 1;

  /// Throws std::invalid_argument if n_units < 1, or if kind == Cbtm and
  /// n_units is not a power of two.
  void validate() const;
};

/// One arm's geometric transmission written symbolically as V_r^r * V_t^t.
struct ArmExponents {
  int r = 0;
  int t = 0;

  /// Number of routers traversed on the way to the multiplexer output.
  int routers() const noexcept { return r + t; }

  /// Numeric transmission for the given router efficiencies (exact
  /// integer powers, no tree-path product).
  double value(double v_r, double v_t) const noexcept;

  /// Compact token such as "Vr^3*Vt", "Vt^2" or "1".
  std::string token() const;

  friend bool operator==(const ArmExponents&, const ArmExponents&) = default;
};

/// Number of ones in the binary representation of x.
int hamming_weight(std::uint64_t x) noexcept;

bool is_power_of_two(int n) noexcept;

// Per-arm exponent pairs in positional order (arm n at index n-1).
// A single unit (levels == 0 resp. n_units == 1) is a bare passthrough.
std::vector<ArmExponents> arm_exponents_cbtm(int levels);
std::vector<ArmExponents> arm_exponents_iibtm(int n_units);
std::vector<ArmExponents> arm_exponents_oibtm(int n_units);
std::vector<ArmExponents> arm_exponents(const TopologySpec& spec);

// Numeric geometric arm transmissions; the general coefficient v_b is not
// folded in here (see effective_arm in engine.hpp).
std::vector<double> arms_cbtm(int levels, const LossModel& loss);
std::vector<double> arms_iibtm(int n_units, const LossModel& loss);
std::vector<double> arms_oibtm(int n_units, const LossModel& loss);

/// Geometric arm transmissions of a multiplexer, in positional order and
/// reordered by descending transmission as preferred by the priority logic.
struct ArmTransmissions {
  std::vector<double> positional;   ///< V_n indexed by arm position n-1
  std::vector<double> prioritized;  ///< same multiset, non-increasing
  /// priority_to_position[k] is the 1-based arm position holding priority
  /// rank k+1. Ties keep positional order (stable sort).
  std::vector<int> priority_to_position;

  std::size_t size() const noexcept { return positional.size(); }
};

ArmTransmissions build_arm_transmissions(const TopologySpec& spec,
                                         const LossModel& loss);

}  // namespace spsmux
