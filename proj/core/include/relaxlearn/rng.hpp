#pragma once

#include <cmath>
#include <cstdint>

namespace relaxlearn {

// Counter-based pseudo-random stream built on 64-bit SplitMix mixing.
// The generator is specified by algorithm so that identical (seed, stream)
// pairs reproduce the same values on every platform:
//
//   mix(z):  z += 0x9E3779B97F4A7C15
//            z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//            z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//            return z ^ (z >> 31)
//
//   draw i of stream (key):   mix(key + i * 0x9E3779B97F4A7C15)
//   substream s of key:       mix(key ^ mix(s + 0x1F123BB5))
//
// Uniform doubles use the top 53 bits; Gaussians use Box-Muller on two
// consecutive uniforms. No hidden state beyond the draw counter, so
// substreams may be consumed in parallel without coordination.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed)) {}

  // Independent child stream; deterministic in (parent key, index).
  Rng fork(std::uint64_t index) const {
    return Rng(FromKey{}, mix(key_ ^ mix(index + 0x1F123BB5ULL)));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  double next_sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

  // Standard normal via Box-Muller; one value per call, no caching.
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace relaxlearn
