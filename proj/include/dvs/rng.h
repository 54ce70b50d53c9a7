#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace dvs {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Purpose tags mixed into derived stream keys so that streams for different
// consumers never coincide.
enum class StreamTag : std::uint64_t {
  kScene = 1,
  kSegOracle = 2,
  kFlowOracle = 3,
  kTrainSplit = 4,
  kWeightInit = 5,
  kShuffle = 6,
  kPreset = 7,
};

// Derives a stream key from a run seed, a purpose tag and any number of
// counters (frame index, region index, ...). The result depends only on the
// arguments, never on the order in which streams are created, so work can be
// spread over threads without changing any draw.
inline std::uint64_t derive_key(std::uint64_t seed, StreamTag tag,
                                std::initializer_list<std::uint64_t> counters = {}) noexcept {
  std::uint64_t key = mix64(seed ^ mix64(static_cast<std::uint64_t>(tag)));
  for (std::uint64_t c : counters) key = mix64(key ^ mix64(c + 0x632BE59BD9B4E019ULL));
  return key;
}

// Counter-based generator: the n-th draw is mix64(key + n * golden). Uniform
// and normal variates are computed here rather than through <random>
// distributions so output is identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}
  RandomStream(std::uint64_t seed, StreamTag tag,
               std::initializer_list<std::uint64_t> counters = {}) noexcept
      : key_(derive_key(seed, tag, counters)) {}

  std::uint64_t next_u64() noexcept {
    return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  // [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

  template <typename Container>
  void shuffle(Container& c) noexcept {
    for (std::size_t i = c.size(); i > 1; --i) {
      using std::swap;
      swap(c[i - 1], c[below(i)]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Noise addressed by absolute frame position. The stream for pixel (x, y)
// depends only on the key and the frame coordinates, so a pixel shared by
// two overlapping regions, or by two division schemes, sees the same draws.
class PixelNoise {
 public:
  explicit PixelNoise(std::uint64_t key, int origin_x = 0, int origin_y = 0) noexcept
      : key_(key), origin_x_(origin_x), origin_y_(origin_y) {}

  // The same field seen from a region whose top-left corner is (x, y).
  PixelNoise offset(int x, int y) const noexcept {
    return PixelNoise(key_, origin_x_ + x, origin_y_ + y);
  }

  // Stream for the region-local pixel (x, y).
  RandomStream at(int x, int y) const noexcept {
    const auto fx = static_cast<std::uint32_t>(origin_x_ + x);
    const auto fy = static_cast<std::uint32_t>(origin_y_ + y);
    return RandomStream(mix64(key_ ^ mix64((static_cast<std::uint64_t>(fy) << 32) | fx)));
  }

 private:
  std::uint64_t key_;
  int origin_x_;
  int origin_y_;
};

}  // namespace dvs
