#pragma once

#include <cmath>
#include <cstdint>

namespace actree {

/// SplitMix64 (Steele, Lea, Flood 2014). Each simulation run draws from its
/// own substream keyed by (seed, run index), so results do not depend on how
/// runs are scheduled across threads.
class SplitMix64 {
 public:
  static constexpr const char* kName = "splitmix64/substream-per-run";

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(mix(seed) + index * 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform on (0, 1].
  double uniform_open0() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  /// Exponential with the given rate; +inf for rate 0.
  double exponential(double rate) {
    if (rate <= 0.0) return INFINITY;
    return -std::log(uniform_open0()) / rate;
  }

 private:
  std::uint64_t state_;
};

}  // namespace actree
