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

#include "surfelsim/geometry.hpp"

namespace surfelsim {

Mat3 rotation_rpy(double roll, double pitch, double yaw) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const Mat3 rx{{1, 0, 0, 0, cr, -sr, 0, sr, cr}};
  const Mat3 ry{{cp, 0, sp, 0, 1, 0, -sp, 0, cp}};
  const Mat3 rz{{cy, -sy, 0, sy, cy, 0, 0, 0, 1}};
  return rz * ry * rx;
}

Mat3 rotation_axis_angle(const Vec3& axis, double angle) {
  const Vec3 u = normalized(axis);
  const double c = std::cos(angle), s = std::sin(angle);
  const double t = 1.0 - c;
  return {{c + u.x * u.x * t, u.x * u.y * t - u.z * s, u.x * u.z * t + u.y * s,
           u.y * u.x * t + u.z * s, c + u.y * u.y * t, u.y * u.z * t - u.x * s,
           u.z * u.x * t - u.y * s, u.z * u.y * t + u.x * s,
           c + u.z * u.z * t}};
}

}  // namespace surfelsim
