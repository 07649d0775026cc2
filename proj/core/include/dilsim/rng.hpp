#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dilsim {

/// Deterministic pseudo-random stream. One stream per randomized concern
/// (mobility, MAC backoff, defer window, cache coin, ...) keyed by a label,
/// so adding a new consumer of randomness never perturbs existing draw
/// sequences for the same seed.
///
/// Generator: xoshiro256**, state derived from splitmix64 over
/// seed ^ fnv1a64(streamId). Identical (seed, streamId) pairs produce
/// identical sequences on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view streamId);

  std::uint64_t next_u64();

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint32_t uniform_int(std::uint32_t bound);

  /// Uniform double in [0, 1).
  double uniform_double();

  /// Uniform double in [a, b).
  double uniform_range(double a, double b);

  static constexpr std::string_view algorithm() { return "xoshiro256**"; }
  static constexpr std::string_view seeding() {
    return "splitmix64(seed ^ fnv1a64(streamId))";
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64_next(std::uint64_t& state);

}  // namespace dilsim
