#pragma once

#include <memory>
#include <optional>

#include "dilsim/geometry.hpp"
#include "dilsim/rng.hpp"
#include "dilsim/time.hpp"

namespace dilsim {

/// Out-dwell-return script shared by all convoy members, so their pairwise
/// distances never change.
struct ConvoyScript {
  SimTime departAt{};
  Duration awayDuration{dur::seconds(30)};
  double speedMps{6.0};
  Vec2 heading{0.0, 1.0};  // unit vector
  double outDistanceM{120.0};
};

struct RandomWalkParams {
  double speedMps{6.0};
  Duration legDuration{dur::seconds(2)};
  Rect bounds{0.0, 0.0, 500.0, 500.0};
};

struct RandomWalkState {
  Vec2 pos{};
  double headingRad{0.0};
  Duration legRemaining{0};
};

/// Advances a walk by dt: straight segments at constant speed, a fresh
/// uniform heading at each leg expiry, specular reflection at the bounds.
RandomWalkState step_random_walk(RandomWalkState state, Duration dt,
                                 const RandomWalkParams& params,
                                 RngStream& rng);

/// Node position as a function of time. Static and convoy trajectories are
/// closed-form; random walks keep a cached state advanced on demand, so
/// queries must be time-monotonic (the event loop guarantees that).
class MobilityModel {
 public:
  static MobilityModel fixed(Vec2 pos);
  static MobilityModel convoy(Vec2 home, ConvoyScript script);
  static MobilityModel random_walk(Vec2 start, RandomWalkParams params,
                                   RngStream rng);

  Vec2 position_at(SimTime t);
  bool is_mobile() const { return kind_ != Kind::Fixed; }

 private:
  enum class Kind { Fixed, Convoy, Walk };

  MobilityModel() = default;

  Kind kind_{Kind::Fixed};
  Vec2 home_{};
  ConvoyScript script_{};
  RandomWalkParams params_{};
  struct WalkCache {
    RandomWalkState state;
    SimTime at{};
    RngStream rng;
  };
  std::shared_ptr<WalkCache> walk_;
};

}  // namespace dilsim
