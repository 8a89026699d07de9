// Copyright 2026 The surfelsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>

namespace surfelsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  bool operator==(const Vec3& o) const = default;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}

inline double squared_norm(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return n > 0.0 ? v / n : Vec3{};
}

// Row-major 3x3 matrix. Only what the pose math needs.
struct Mat3 {
  double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[3 * i + k] * o.m[3 * k + j];
        r.m[3 * i + j] = s;
      }
    return r;
  }

  Mat3 transpose() const {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }

  bool operator==(const Mat3& o) const {
    for (int i = 0; i < 9; ++i)
      if (m[i] != o.m[i]) return false;
    return true;
  }
};

// Intrinsic rotations applied as R = Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rotation_rpy(double roll, double pitch, double yaw);

// Rodrigues form, axis need not be normalized unless angle encodes magnitude.
Mat3 rotation_axis_angle(const Vec3& axis, double angle);

// Rigid transform, maps child-frame points into the parent frame.
struct Pose {
  Mat3 rotation;
  Vec3 translation;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Pose inverse() const {
    const Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  // Composition: (a * b).apply(p) == a.apply(b.apply(p)).
  Pose operator*(const Pose& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }

  bool operator==(const Pose& o) const = default;
};

inline Vec3 se3_apply(const Pose& pose, const Vec3& p) {
  return pose.apply(p);
}

enum class SemanticClass : std::uint8_t {
  kBackground = 1,
  kRoad = 2,
  kVehicle = 3,
};

// Oriented disk with the point attributes recorded when it was built.
struct Surfel {
  Vec3 center;
  Vec3 normal;  // unit length
  double radius = 0.0;
  double orig_intensity = 0.0;
  double orig_range = 0.0;
  double orig_incidence = 0.0;
  SemanticClass semantic_class = SemanticClass::kBackground;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double time_offset = 0.0;
  std::int32_t laser_row = 0;
  std::int32_t azimuth_col = 0;
};

struct Hit {
  double range = 0.0;
  Vec3 point;
  std::int32_t surfel_index = -1;
  double incidence = 0.0;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps to [-pi, pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

// Wraps to [0, 2*pi).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

// Angle between a ray direction and a surface normal, folded to [0, pi/2]
// so the surfel's two-sidedness does not show up in the value.
inline double incidence_angle(const Vec3& direction, const Vec3& normal) {
  double c = std::abs(dot(direction, normal));
  if (c > 1.0) c = 1.0;
  return std::acos(c);
}

// Denominator threshold below which a ray is treated as parallel to the
// disk plane.
inline constexpr double kParallelEps = 1e-9;

// Core ray/disk test shared by the engine and the brute-force checker:
// returns true and the parametric distance when the ray pierces the disk
// beyond t_min. Two-sided; boundary counts as a hit.
inline bool ray_disk_hit_t(const Vec3& origin, const Vec3& direction,
                           const Surfel& s, double t_min, double& t_out) {
  const double denom = dot(direction, s.normal);
  if (std::abs(denom) < kParallelEps) return false;
  const double t = dot(s.center - origin, s.normal) / denom;
  if (!(t > t_min)) return false;
  const Vec3 p = origin + t * direction;
  if (squared_norm(p - s.center) > s.radius * s.radius) return false;
  t_out = t;
  return true;
}

inline std::optional<Hit> ray_disk_intersect(const Ray& ray, const Surfel& s,
                                             double t_min = 0.1) {
  double t;
  if (!ray_disk_hit_t(ray.origin, ray.direction, s, t_min, t)) {
    return std::nullopt;
  }
  Hit h;
  h.range = t;
  h.point = ray.origin + t * ray.direction;
  h.incidence = incidence_angle(ray.direction, s.normal);
  return h;
}

}  // namespace surfelsim
