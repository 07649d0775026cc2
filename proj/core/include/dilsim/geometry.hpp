#pragma once

#include <cmath>

namespace dilsim {

struct Vec2 {
  double x{0};
  double y{0};

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Rect {
  double minX{0}, minY{0}, maxX{0}, maxY{0};

  bool contains(Vec2 p) const {
    return p.x >= minX && p.x <= maxX && p.y >= minY && p.y <= maxY;
  }
};

}  // namespace dilsim
