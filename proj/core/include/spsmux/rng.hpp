#pragma once

#include <cstdint>

namespace spsmux {

/// SplitMix64: 64-bit state advanced by a fixed odd constant and hashed with
/// Stafford's mix13 finalizer. Passes BigCrush, costs a handful of cycles per
/// draw, and supports cheap substreams, which is all the simulation needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return (next() >> 11) * 0x1.0p-53; }

  /// Generator for substream `index` of `seed`. The initial state is the
  /// double-mixed hash of the pair, so the mapping depends only on the two
  /// values and distinct pairs land in unrelated regions of the state space.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
    return SplitMix64(mix(h ^ 0x94d049bb133111ebULL));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace spsmux
