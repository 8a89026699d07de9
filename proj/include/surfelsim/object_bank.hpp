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
#include <string>
#include <vector>

#include "surfelsim/geometry.hpp"
#include "surfelsim/points.hpp"

namespace surfelsim {

// Annotated 3-d box of one object observation. dims stores full extents
// (length, width, height) along the object's own x/y/z axes; heading is the
// yaw of the object frame in the map frame.
struct BoxLabel {
  Vec3 center;
  double heading = 0.0;
  Vec3 dims;
  double timestamp = 0.0;
};

// Reconstructed object: surfels in the object frame (x forward along the
// label heading, origin at the box centre).
struct ObjectAsset {
  std::string source_id;
  std::vector<Surfel> surfels;
  Vec3 dims;
  // Heading of the object relative to the recording sensor's viewing
  // direction at the first observation, radians in [-pi, pi).
  double rel_orientation = 0.0;
};

struct IcpResult {
  Pose transform;  // maps source points onto the target
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // weighted RMS point distance at the last step
};

struct IcpOptions {
  int max_iterations = 50;
  // Converged when both the translation step and the rotation step fall
  // below these thresholds.
  double translation_tol = 1e-6;
  double rotation_tol = 1e-6;
  // Pair weight exp(-(dI/sigma)^2) from the intensity mismatch.
  double intensity_sigma = 0.1;
};

struct MeshifyOptions {
  double voxel_size = 0.04;
  // Points with fewer than min_neighbors others within neighbor_radius are
  // discarded as outliers before disks are fitted.
  std::size_t min_neighbors = 4;
  double neighbor_radius = 0.10;
  // Quality floor on the surviving point count.
  std::size_t min_points = 50;
  // Surfels outside dims scaled by this factor are clipped away.
  double dims_margin = 1.1;
};

// Collects the returns inside each label's box into the object frame of
// that label. Sweep timestamps choose the label whose timestamp is nearest.
// Throws QualityError when no point falls inside any box.
std::vector<PointSample> accumulate_object(std::span<const Sweep> sweeps,
                                           std::span<const BoxLabel> labels);

// Doubles the cloud by reflecting across the heading plane (y -> -y in the
// object frame). Reflected copies keep their attributes; sensor origins are
// mirrored with the points so view-dependent fields stay consistent.
std::vector<PointSample> mirror_symmetry(
    std::span<const PointSample> object_points);

// Intensity-weighted point-to-point alignment of source onto target.
// Correspondences are nearest neighbours; each pair is weighted by
// exp(-(dI/sigma)^2) and the weighted least-squares rigid motion is solved
// in closed form each iteration.
IcpResult icp_refine(std::span<const PointSample> source,
                     std::span<const PointSample> target,
                     const IcpOptions& options = {});

// Outlier removal, clipping to the (scaled) label box, then one disk per
// voxel with normals oriented toward the recorded sensor side. Throws
// QualityError when fewer than min_points survive.
ObjectAsset meshify_object(std::span<const PointSample> object_points,
                           const Vec3& dims, std::string source_id,
                           const MeshifyOptions& options = {});

// Picks uniformly (seeded) among the k bank entries with the best fitness
//   -(|dims - query_dims|_2 + 0.5 * |wrap(rel_orientation - query_rel)|),
// ties broken by bank index. Returns the chosen index; throws
// ResolutionError on an empty bank.
std::size_t select_object(std::span<const ObjectAsset> bank,
                          const Vec3& query_dims, double query_rel_orientation,
                          std::size_t k, std::uint64_t seed);

}  // namespace surfelsim
