#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>

namespace mrmr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  constexpr Vec2 xy() const { return {x, y}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  constexpr Vec3 position() const { return {x, y, z}; }
  constexpr Vec2 xy() const { return {x, y}; }
};

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

struct Cell2 {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Cell2, Cell2) = default;
  friend constexpr auto operator<=>(Cell2, Cell2) = default;
};

struct Cell3 {
  int x = 0;
  int y = 0;
  int z = 0;
  friend constexpr bool operator==(Cell3, Cell3) = default;
  friend constexpr auto operator<=>(Cell3, Cell3) = default;
};

}  // namespace mrmr
