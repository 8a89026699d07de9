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

#include "surfelsim/polar_grid.hpp"

#include <cmath>

#include "surfelsim/errors.hpp"

namespace surfelsim {

namespace {

// Column edges are nudged by a fraction of a cell so that positions which
// round-tripped through float32 storage still land in the emitting column.
constexpr double kColumnNudge = 1e-3;

std::int32_t azimuth_column(const Vec3& p, const SensorIntrinsics& intr) {
  const double phi = std::atan2(p.y, p.x);
  const double u =
      wrap_two_pi(intr.spin_direction * (phi - intr.azimuth_start)) /
      kTwoPi * intr.n_cols;
  std::int32_t col = static_cast<std::int32_t>(std::floor(u + kColumnNudge));
  if (col >= intr.n_cols) col -= intr.n_cols;
  return col;
}

}  // namespace

float semantic_code(SemanticClass c) {
  return static_cast<float>(static_cast<std::uint8_t>(c));
}

Grid project(const HitImage& hits) {
  Grid g = Grid::zeros(channel::kCount, hits.rows, hits.cols);
  for (std::int32_t r = 0; r < hits.rows; ++r) {
    for (std::int32_t c = 0; c < hits.cols; ++c) {
      g.at(channel::kLaserId, r, c) = static_cast<float>(r);
      const HitCell& cell = hits.at(r, c);
      if (!cell.hit) continue;
      g.at(channel::kRange, r, c) = static_cast<float>(cell.range);
      g.at(channel::kOrigIntensity, r, c) =
          static_cast<float>(cell.orig_intensity);
      g.at(channel::kIncidence, r, c) = static_cast<float>(cell.incidence);
      g.at(channel::kOrigRange, r, c) = static_cast<float>(cell.orig_range);
      g.at(channel::kOrigIncidence, r, c) =
          static_cast<float>(cell.orig_incidence);
      g.at(channel::kSemantic, r, c) = semantic_code(cell.semantic_class);
      g.at(channel::kOccupancy, r, c) = 1.0f;
    }
  }
  return g;
}

BinResult bin_real_sweep(std::span<const PointSample> points,
                         const SensorIntrinsics& intrinsics) {
  intrinsics.validate();
  BinResult result;
  result.occupancy = Grid::zeros(1, intrinsics.n_beams, intrinsics.n_cols);
  result.range = Grid::zeros(1, intrinsics.n_beams, intrinsics.n_cols);

  for (const PointSample& p : points) {
    if (p.laser_id < 0 || p.laser_id >= intrinsics.n_beams)
      throw InputError("laser id outside the sensor's beam range");
    const std::int32_t col = azimuth_column(p.position, intrinsics);
    const double r = norm(p.position);
    float& occ = result.occupancy.at(0, p.laser_id, col);
    float& range = result.range.at(0, p.laser_id, col);
    if (occ == 0.0f) {
      occ = 1.0f;
      range = static_cast<float>(r);
    } else {
      ++result.collisions;
      if (r < range) range = static_cast<float>(r);
    }
  }
  return result;
}

std::vector<PointSample> to_pointcloud(const Grid& features,
                                       const Grid& keep_mask,
                                       const RayImage& rays) {
  if (features.channels != channel::kCount)
    throw InputError("feature grid has the wrong channel count");
  if (keep_mask.channels != 1 || keep_mask.rows != features.rows ||
      keep_mask.cols != features.cols)
    throw InputError("keep mask does not match the feature grid");
  if (rays.rows != features.rows || rays.cols != features.cols)
    throw InputError("ray image does not match the feature grid");

  std::vector<PointSample> out;
  for (std::int32_t r = 0; r < features.rows; ++r) {
    for (std::int32_t c = 0; c < features.cols; ++c) {
      if (features.at(channel::kOccupancy, r, c) == 0.0f) continue;
      if (keep_mask.at(0, r, c) == 0.0f) continue;
      const Ray& ray = rays.at(r, c);
      PointSample p;
      const double range = features.at(channel::kRange, r, c);
      p.position = ray.origin + range * ray.direction;
      p.intensity = features.at(channel::kOrigIntensity, r, c);
      p.laser_id = r;
      p.timestamp = rays.sweep_start + ray.time_offset;
      const int code =
          static_cast<int>(std::lround(features.at(channel::kSemantic, r, c)));
      p.semantic_class = code == 2 ? SemanticClass::kRoad
                         : code == 3 ? SemanticClass::kVehicle
                                     : SemanticClass::kBackground;
      p.dynamic = p.semantic_class == SemanticClass::kVehicle;
      p.sensor_origin = ray.origin;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace surfelsim
