#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace bdperiod {

/// SplitMix64 step (Steele, Lea & Flood). Advances `state` and returns the
/// next output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * xoshiro256** 1.0 (Blackman & Vigna), state filled from four SplitMix64
 * outputs of the seed. Fixed algorithm, so a seed names the same stream on
 * every platform.
 */
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
  }

  /// Raw state, for reproducing published test vectors.
  static Xoshiro256 from_state(const std::array<std::uint64_t, 4>& s) {
    Xoshiro256 g(0);
    g.s_ = s;
    return g;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

/// Per-trajectory seeds for a fleet: the first `count` SplitMix64 outputs
/// of `base`.
inline std::vector<std::uint64_t> fleet_seeds(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> out(count);
  std::uint64_t sm = base;
  for (auto& s : out) s = splitmix64(sm);
  return out;
}

}  // namespace bdperiod
