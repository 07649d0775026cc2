#include "dilsim/mobility.hpp"

#include <cmath>
#include <stdexcept>

namespace dilsim {

namespace {

// Moves p along (cos h, sin h) by dist, reflecting heading off the walls of
// bounds. Multiple reflections within one segment are possible in corners.
void move_with_reflection(Vec2& p, double& heading, double dist,
                          const Rect& bounds) {
  int guard = 0;
  while (dist > 1e-12 && ++guard < 64) {
    const double dx = std::cos(heading);
    const double dy = std::sin(heading);

    double tHit = dist;  // distance until first wall contact
    bool hitX = false, hitY = false;
    if (dx > 1e-15) {
      double t = (bounds.maxX - p.x) / dx;
      if (t < tHit) { tHit = t; hitX = true; hitY = false; }
    } else if (dx < -1e-15) {
      double t = (bounds.minX - p.x) / dx;
      if (t < tHit) { tHit = t; hitX = true; hitY = false; }
    }
    if (dy > 1e-15) {
      double t = (bounds.maxY - p.y) / dy;
      if (t < tHit) { tHit = t; hitY = true; hitX = false; }
      else if (t == tHit && hitX) { hitY = true; }  // corner
    } else if (dy < -1e-15) {
      double t = (bounds.minY - p.y) / dy;
      if (t < tHit) { tHit = t; hitY = true; hitX = false; }
      else if (t == tHit && hitX) { hitY = true; }
    }

    if (tHit < 0) tHit = 0;
    p.x += dx * tHit;
    p.y += dy * tHit;
    dist -= tHit;

    if (!hitX && !hitY) break;  // moved the full distance
    heading = std::atan2(hitY ? -dy : dy, hitX ? -dx : dx);
    // clamp against accumulated float error
    p.x = std::min(std::max(p.x, bounds.minX), bounds.maxX);
    p.y = std::min(std::max(p.y, bounds.minY), bounds.maxY);
  }
}

}  // namespace

RandomWalkState step_random_walk(RandomWalkState state, Duration dt,
                                 const RandomWalkParams& params,
                                 RngStream& rng) {
  if (dt <= 0) throw std::invalid_argument("step_random_walk: dt must be > 0");
  while (dt > 0) {
    if (state.legRemaining <= 0) {
      state.headingRad = rng.uniform_range(0.0, 2.0 * M_PI);
      state.legRemaining = params.legDuration;
    }
    const Duration step = std::min(dt, state.legRemaining);
    move_with_reflection(state.pos, state.headingRad,
                         params.speedMps * dur::to_seconds(step),
                         params.bounds);
    state.legRemaining -= step;
    dt -= step;
  }
  return state;
}

MobilityModel MobilityModel::fixed(Vec2 pos) {
  MobilityModel m;
  m.kind_ = Kind::Fixed;
  m.home_ = pos;
  return m;
}

MobilityModel MobilityModel::convoy(Vec2 home, ConvoyScript script) {
  MobilityModel m;
  m.kind_ = Kind::Convoy;
  m.home_ = home;
  m.script_ = script;
  return m;
}

MobilityModel MobilityModel::random_walk(Vec2 start, RandomWalkParams params,
                                         RngStream rng) {
  MobilityModel m;
  m.kind_ = Kind::Walk;
  m.home_ = start;
  m.params_ = params;
  m.walk_ = std::make_shared<WalkCache>(
      WalkCache{RandomWalkState{start, 0.0, Duration{0}}, SimTime{},
                std::move(rng)});
  return m;
}

Vec2 MobilityModel::position_at(SimTime t) {
  switch (kind_) {
    case Kind::Fixed:
      return home_;
    case Kind::Convoy: {
      if (t <= script_.departAt) return home_;
      const Duration travel =
          dur::from_seconds(script_.outDistanceM / script_.speedMps);
      const SimTime outEnd = script_.departAt + travel;
      const SimTime dwellEnd = outEnd + script_.awayDuration;
      const SimTime homeAgain = dwellEnd + travel;
      double offset;
      if (t < outEnd) {
        offset = script_.speedMps * dur::to_seconds(t - script_.departAt);
      } else if (t < dwellEnd) {
        offset = script_.outDistanceM;
      } else if (t < homeAgain) {
        offset =
            script_.outDistanceM - script_.speedMps * dur::to_seconds(t - dwellEnd);
      } else {
        offset = 0.0;
      }
      return home_ + script_.heading * offset;
    }
    case Kind::Walk: {
      auto& c = *walk_;
      if (t < c.at)
        throw std::invalid_argument("random walk queried backwards in time");
      if (t > c.at) {
        c.state = step_random_walk(c.state, t - c.at, params_, c.rng);
        c.at = t;
      }
      return c.state.pos;
    }
  }
  return home_;
}

}  // namespace dilsim
