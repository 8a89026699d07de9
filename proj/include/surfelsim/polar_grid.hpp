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
#include <span>
#include <vector>

#include "surfelsim/points.hpp"
#include "surfelsim/raycast.hpp"

namespace surfelsim {

// Dense float image stack, channel-major then row-major.
struct Grid {
  std::int32_t channels = 0;
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  std::vector<float> data;

  static Grid zeros(std::int32_t channels, std::int32_t rows,
                    std::int32_t cols) {
    Grid g;
    g.channels = channels;
    g.rows = rows;
    g.cols = cols;
    g.data.assign(static_cast<std::size_t>(channels) * rows * cols, 0.0f);
    return g;
  }

  std::size_t cell_count() const {
    return static_cast<std::size_t>(rows) * cols;
  }

  float& at(std::int32_t channel, std::int32_t row, std::int32_t col) {
    return data[(static_cast<std::size_t>(channel) * rows + row) * cols + col];
  }
  float at(std::int32_t channel, std::int32_t row, std::int32_t col) const {
    return data[(static_cast<std::size_t>(channel) * rows + row) * cols + col];
  }

  bool operator==(const Grid&) const = default;
};

// Feature channel layout produced by project().
namespace channel {
inline constexpr std::int32_t kRange = 0;
inline constexpr std::int32_t kOrigIntensity = 1;
inline constexpr std::int32_t kIncidence = 2;
inline constexpr std::int32_t kOrigRange = 3;
inline constexpr std::int32_t kOrigIncidence = 4;
inline constexpr std::int32_t kLaserId = 5;
inline constexpr std::int32_t kSemantic = 6;
inline constexpr std::int32_t kOccupancy = 7;
inline constexpr std::int32_t kCount = 8;
}  // namespace channel

// Numeric codes used in the semantic channel; empty cells stay 0.
float semantic_code(SemanticClass c);

// Fills the eight feature channels from a cast sweep. Empty and masked
// cells keep zeros in every channel except the laser id, which always
// states the row's beam.
Grid project(const HitImage& hits);

struct BinResult {
  Grid occupancy;  // single channel, 1 where at least one return landed
  Grid range;      // single channel, closest return per cell, 0 when empty
  std::int64_t collisions = 0;  // returns beyond the first in their cell
};

// Bins recorded returns (sensor-frame positions, sweep-start frame) into the
// sensor's row/column layout. Rows come from the recorded laser id; columns
// from the azimuth. When several returns land in one cell the closest range
// wins and the rest are counted as collisions.
BinResult bin_real_sweep(std::span<const PointSample> points,
                         const SensorIntrinsics& intrinsics);

// Rebuilds the surviving returns as points: one sample per cell with
// occupancy and keep-mask both set, placed along the cell's ray at the
// recorded range. Timestamps are the per-column firing times.
std::vector<PointSample> to_pointcloud(const Grid& features,
                                       const Grid& keep_mask,
                                       const RayImage& rays);

}  // namespace surfelsim
