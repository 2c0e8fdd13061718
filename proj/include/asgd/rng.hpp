#pragma once

#include <cstdint>
#include <limits>

namespace asgd {

// SplitMix64 finalizer: a bijective 64-bit mix with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stream identifiers reserved for non-replicate uses. Replicate r uses id r.
inline constexpr std::uint64_t kOracleStream = 0xFFFFFFFF00000001ULL;
inline constexpr std::uint64_t kAssumptionStream = 0xFFFFFFFF00000002ULL;
inline constexpr std::uint64_t kEstimateStream = 0xFFFFFFFF00000003ULL;
inline constexpr std::uint64_t kDatasetStream = 0xFFFFFFFF00000004ULL;

// Key of stream `stream` under `seed`:
//   key = mix64(mix64(seed + golden) ^ mix64(stream * 0xD1B54A32D192ED03 + golden))
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed + kGolden) ^ mix64(stream * 0xD1B54A32D192ED03ULL + kGolden));
}

// Counter-based generator: draw i (i = 1, 2, ...) of a stream is
// mix64(key + i * golden). The draw index is the whole state, so any draw
// can be reproduced from (seed, stream, index) alone.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng() = default;
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(stream_key(seed, stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace asgd
