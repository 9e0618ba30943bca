#pragma once

#include <cmath>
#include <numbers>

namespace wayfarer {

// World coordinates in meters: x east, y up, z north. The ground plane is y = 0.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr bool operator==(Vec3 a, Vec3 b) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

// Distance projected onto the ground plane (y ignored).
inline double ground_distance(Vec3 a, Vec3 b) { return std::hypot(a.x - b.x, a.z - b.z); }

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps any angle into [0, 360).
inline double normalize_yaw(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

// Signed difference a - b wrapped into (-180, 180].
inline double angle_diff(double a, double b) {
  double d = normalize_yaw(a - b);
  return d > 180.0 ? d - 360.0 : d;
}

// Yaw 0 faces +z and grows clockwise seen from above, so yaw 90 faces +x.
inline Vec3 heading_vector(double yaw_deg) {
  const double r = deg2rad(yaw_deg);
  return {std::sin(r), 0.0, std::cos(r)};
}

// Yaw of the ground-plane direction (dx, dz); undefined for the zero vector.
inline double yaw_of(double dx, double dz) { return normalize_yaw(rad2deg(std::atan2(dx, dz))); }

// Angle between two directions in degrees, numerically stable near 0 and 180.
inline double angle_between_deg(Vec3 a, Vec3 b) {
  return rad2deg(std::atan2(norm(cross(a, b)), dot(a, b)));
}

struct Pose {
  Vec3 position;
  double yaw = 0.0;  // degrees in [0, 360)

  friend bool operator==(const Pose&, const Pose&) = default;
};

}  // namespace wayfarer
