#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace dilsim {

/// Span between two simulation instants, in integer nanoseconds.
using Duration = std::int64_t;

namespace dur {
constexpr Duration nanos(std::int64_t v) { return v; }
constexpr Duration micros(std::int64_t v) { return v * 1'000; }
constexpr Duration millis(std::int64_t v) { return v * 1'000'000; }
constexpr Duration seconds(std::int64_t v) { return v * 1'000'000'000; }
inline Duration from_seconds(double s) {
  return static_cast<Duration>(std::llround(s * 1e9));
}
constexpr double to_seconds(Duration d) { return static_cast<double>(d) / 1e9; }
}  // namespace dur

/// Absolute simulation time. Integer nanoseconds so that event ordering is
/// bit-stable across platforms and replays.
struct SimTime {
  std::int64_t ns{0};

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(Duration d) const { return SimTime{ns + d}; }
  constexpr SimTime operator-(Duration d) const { return SimTime{ns - d}; }
  constexpr Duration operator-(SimTime other) const { return ns - other.ns; }

  constexpr double seconds() const { return static_cast<double>(ns) / 1e9; }

  static constexpr SimTime max() {
    return SimTime{std::numeric_limits<std::int64_t>::max()};
  }
};

}  // namespace dilsim
