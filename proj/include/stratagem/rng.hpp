#pragma once

#include <cstdint>
#include <limits>

namespace stratagem {

/// Counter-based 64-bit generator (SplitMix64). The whole stream position is
/// a single word, so it can live inside a GameState and be copied with it.
/// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr SplitMix64() = default;
  constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  constexpr std::uint64_t state() const { return state_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n). Uses Lemire's multiply-shift with rejection
  /// so results do not depend on the standard library's distribution code.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
      if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

 private:
  std::uint64_t state_ = 0;
};

/// Derives an independent stream seed from a base seed and a salt.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return SplitMix64::mix(base ^ SplitMix64::mix(salt + 0x632BE59BD9B4E019ULL));
}

}  // namespace stratagem
