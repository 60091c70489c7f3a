#pragma once

#include <cstdint>
#include <limits>

namespace fourway {

// SplitMix64 (Steele, Lea & Flood 2014). Satisfies UniformRandomBitGenerator.
//
// Stream discipline: every independent unit of work (a simulated individual,
// a bootstrap replicate) owns the substream substream(seed, index), so results
// never depend on how work is split across threads.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix(z);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64::mix(seed) ^ SplitMix64::mix(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace fourway
