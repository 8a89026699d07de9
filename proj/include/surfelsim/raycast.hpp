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

#include <cstdint>
#include <vector>

#include "surfelsim/geometry.hpp"
#include "surfelsim/scene.hpp"

namespace surfelsim {

// Spinning-sensor beam geometry. Beams fire column by column; all beams of
// a column share one firing time.
struct SensorIntrinsics {
  std::int32_t n_beams = 64;
  std::int32_t n_cols = 2048;
  std::vector<double> elevations;  // radians, one per beam, descending
  double azimuth_start = 0.0;
  std::int32_t spin_direction = 1;  // +1 counter-clockwise, -1 clockwise
  double sweep_period = 0.1;        // seconds per full revolution
  double min_range = 0.1;           // returns closer than this are ignored

  // 64 beams uniformly spaced from +2.0 to -24.9 degrees.
  static SensorIntrinsics default64();

  // Throws InputError on inconsistent fields.
  void validate() const;
};

// Rays of one sweep, row-major (beam row, azimuth column).
struct RayImage {
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  double sweep_start = 0.0;
  std::vector<Ray> rays;

  const Ray& at(std::int32_t row, std::int32_t col) const {
    return rays[static_cast<std::size_t>(row) * cols + col];
  }
};

// Column j fires at sweep_start + (j / n_cols) * period from the linearly
// extrapolated sensor position c0 + dt * v0; directions come from the pose
// at sweep start. This is the declared motion model: no per-column pose
// lookup, so a constant-velocity trajectory reproduces it exactly.
RayImage generate_rays(const SensorIntrinsics& intrinsics,
                       const Trajectory& sdv_trajectory, double sweep_start);

// Actor poses are frozen on a fixed grid of intervals per sweep; every ray
// in an interval sees the actor at the interval's midpoint time.
inline constexpr std::int32_t kActorPoseIntervals = 360;

inline std::int32_t actor_interval(double time_offset, double sweep_period) {
  const std::int32_t k = static_cast<std::int32_t>(
      std::floor(time_offset * kActorPoseIntervals / sweep_period));
  return k < 0 ? 0 : (k >= kActorPoseIntervals ? kActorPoseIntervals - 1 : k);
}

inline double actor_interval_time(double sweep_start, std::int32_t interval,
                                  double sweep_period) {
  return sweep_start +
         (static_cast<double>(interval) + 0.5) * sweep_period /
             kActorPoseIntervals;
}

// True when the return at `range` must be suppressed by the exclusion box:
// the recorded segment would end inside the box, or pass through a box
// lying ahead of the sensor. A box behind the ray never masks.
bool sdv_box_masks_return(const Pose& box_to_map, const Vec3& box_dims,
                          const Vec3& origin, const Vec3& direction,
                          double range);

struct HitCell {
  bool hit = false;
  bool sdv_masked = false;  // a return existed but was suppressed
  std::int32_t actor = -1;  // -1 static map, otherwise actor index
  std::int32_t surfel = -1;
  double range = 0.0;
  double incidence = 0.0;
  double orig_intensity = 0.0;
  double orig_range = 0.0;
  double orig_incidence = 0.0;
  SemanticClass semantic_class = SemanticClass::kBackground;
};

struct HitImage {
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  double sweep_start = 0.0;
  RayImage rays;
  std::vector<HitCell> cells;

  const HitCell& at(std::int32_t row, std::int32_t col) const {
    return cells[static_cast<std::size_t>(row) * cols + col];
  }
  HitCell& at(std::int32_t row, std::int32_t col) {
    return cells[static_cast<std::size_t>(row) * cols + col];
  }
};

// Casts one full sweep against the scene. Parallel over rays; every cell is
// written only by its own ray, so the result is identical for any thread
// count.
HitImage cast_sweep(const Scene& scene, const SensorIntrinsics& intrinsics,
                    double sweep_start);

}  // namespace surfelsim
