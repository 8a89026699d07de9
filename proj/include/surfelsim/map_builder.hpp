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
#include <optional>
#include <span>
#include <vector>

#include "surfelsim/bvh.hpp"
#include "surfelsim/geometry.hpp"
#include "surfelsim/points.hpp"

namespace surfelsim {

// Static environment model: one oriented disk per occupied voxel, plus the
// spatial index used by the caster. The index refers into surfels by
// position, so the vector must not be reordered after construction.
struct SurfelMap {
  std::vector<Surfel> surfels;
  double voxel_size = 0.04;
  Bvh index;

  void rebuild_index() { index.build(surfels); }
};

struct SurfelBuildOptions {
  double voxel_size = 0.04;
  // <= 0 selects half the voxel diagonal, which keeps neighbouring disks
  // overlapping enough to close gaps between cells.
  double disk_radius = 0.0;
  double normal_radius = 0.20;
  std::size_t normal_max_neighbors = 200;
};

struct SurfelBuildStats {
  std::size_t input_points = 0;
  std::size_t voxel_points = 0;
  std::size_t degenerate_dropped = 0;
};

// Merges static returns of all sweeps into the map frame. Points flagged
// dynamic are dropped. The per-sweep masks, when given, override the
// samples' own flags and must match the sweeps in count and size.
std::vector<PointSample> aggregate_sweeps(
    std::span<const Sweep> sweeps,
    std::span<const std::vector<std::uint8_t>> dynamic_masks = {});

// Keeps one representative point per occupied voxel: the input point closest
// to the voxel centre, earlier index winning ties. Output follows voxel
// first-visit order, so it is a deterministic function of the input order.
std::vector<PointSample> voxel_downsample(std::span<const PointSample> points,
                                          double voxel_size);

// Plane normal of a neighbourhood via the covariance eigenvector of the
// smallest eigenvalue. Returns nothing when the neighbourhood is too small
// or has no dominant plane (smallest two eigenvalues nearly equal).
std::optional<Vec3> estimate_normal(std::span<const Vec3> neighbors);

// Full pipeline: downsample, estimate per-representative normals from the
// original cloud, orient each normal toward its recording sensor, attach
// recorded attributes, build the index. Degenerate neighbourhoods are
// dropped and counted.
SurfelMap build_surfels(std::span<const PointSample> points,
                        const SurfelBuildOptions& options = {},
                        SurfelBuildStats* stats = nullptr);

}  // namespace surfelsim
