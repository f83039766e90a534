#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>

namespace cumdiff {

// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators"). The i-th output is a pure function of (seed, i):
//
//   output_i = mix(seed + (i + 1) * kGoldenGamma)
//
// so the sequence behaves as a counter-based stream and reproduces exactly
// on every platform; all state is integer arithmetic.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]; 53-bit resolution. Never returns 0, so logarithms
  // of the result are finite.
  double next_unit() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased integer in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via the Marsaglia polar method. Consumes a variable
  // number of stream values; the second draw of each pair is cached.
  double next_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Seed for the index-th substream of a master seed: the (index+1)-th
// SplitMix64 output in closed form. Distinct indices give decorrelated
// streams, and the derivation is O(1) so trials can be generated in any
// order (or in parallel) with identical results.
inline constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + (index + 1) * SplitMix64::kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// In-place Fisher-Yates shuffle driven by an explicit stream.
template <typename T>
void seeded_shuffle(std::span<T> items, SplitMix64& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace cumdiff
