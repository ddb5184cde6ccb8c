#pragma once

/*
 * Counter-based random streams for reproducible parallel Monte Carlo.
 *
 * Each stream is a SplitMix64 sequence keyed by (master seed, stream id):
 * output n is a bijective mix of base + n*gamma, so a stream is a pure
 * function of its key and position. Trial t always uses stream id t, which
 * makes every simulation bit-reproducible regardless of how trials are
 * scheduled across worker threads.
 */

#include <cstdint>

namespace rmp {

/// Stream-id offsets so auxiliary draws (hyperplane candidates, reference
/// Gaussian samples, ...) never collide with per-trial walk streams.
inline constexpr std::uint64_t kStreamDomainTrial = 0;
inline constexpr std::uint64_t kStreamDomainHyperplane = 1ull << 48;
inline constexpr std::uint64_t kStreamDomainReference = 2ull << 48;
inline constexpr std::uint64_t kStreamDomainProbe = 3ull << 48;

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : state_(mix(mix(master_seed ^ 0x8000000000000000ull) ^
                   mix(stream_id + 0x9E3779B97F4A7C15ull))) {}

  /// Next 64 uniform bits.
  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) {
    // multiply-shift; bias is < 2^-64 * n, negligible at desk scale
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (two uniforms per call, no caching,
  /// so the draw count per sample is fixed and stream-reproducible).
  double gaussian();

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace rmp
