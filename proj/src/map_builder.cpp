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

#include "surfelsim/map_builder.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>

#include "surfelsim/errors.hpp"
#include "surfelsim/kdtree.hpp"
#include "surfelsim/rng.hpp"

namespace surfelsim {

std::vector<PointSample> aggregate_sweeps(
    std::span<const Sweep> sweeps,
    std::span<const std::vector<std::uint8_t>> dynamic_masks) {
  const bool use_masks = !dynamic_masks.empty();
  if (use_masks && dynamic_masks.size() != sweeps.size())
    throw InputError("dynamic mask count does not match sweep count");

  std::vector<PointSample> out;
  for (std::size_t si = 0; si < sweeps.size(); ++si) {
    const Sweep& sweep = sweeps[si];
    if (use_masks && dynamic_masks[si].size() != sweep.points.size())
      throw InputError("dynamic mask size does not match sweep point count");
    for (std::size_t pi = 0; pi < sweep.points.size(); ++pi) {
      const PointSample& p = sweep.points[pi];
      const bool is_dynamic = use_masks ? dynamic_masks[si][pi] != 0
                                        : p.dynamic;
      if (is_dynamic) continue;
      PointSample q = p;
      q.position = sweep.sensor_to_map.apply(p.position);
      q.sensor_origin = sweep.sensor_to_map.translation;
      q.dynamic = false;
      out.push_back(q);
    }
  }
  return out;
}

namespace {

struct VoxelKey {
  std::int64_t i, j, k;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& key) const {
    return mix64(mix64(mix64(static_cast<std::uint64_t>(key.i)) ^
                       static_cast<std::uint64_t>(key.j)) ^
                 static_cast<std::uint64_t>(key.k));
  }
};

inline VoxelKey voxel_of(const Vec3& p, double s) {
  return {static_cast<std::int64_t>(std::floor(p.x / s)),
          static_cast<std::int64_t>(std::floor(p.y / s)),
          static_cast<std::int64_t>(std::floor(p.z / s))};
}

}  // namespace

std::vector<PointSample> voxel_downsample(std::span<const PointSample> points,
                                          double voxel_size) {
  if (!(voxel_size > 0.0)) throw InputError("voxel size must be positive");

  struct Best {
    std::size_t slot;
    double d2;
  };
  std::unordered_map<VoxelKey, Best, VoxelKeyHash> voxels;
  voxels.reserve(points.size());
  std::vector<std::size_t> chosen;  // input index per occupied voxel

  for (std::size_t i = 0; i < points.size(); ++i) {
    const VoxelKey key = voxel_of(points[i].position, voxel_size);
    const Vec3 center{(static_cast<double>(key.i) + 0.5) * voxel_size,
                      (static_cast<double>(key.j) + 0.5) * voxel_size,
                      (static_cast<double>(key.k) + 0.5) * voxel_size};
    const double d2 = squared_norm(points[i].position - center);
    auto [it, inserted] = voxels.try_emplace(key, Best{chosen.size(), d2});
    if (inserted) {
      chosen.push_back(i);
    } else if (d2 < it->second.d2) {  // ties keep the earlier point
      it->second.d2 = d2;
      chosen[it->second.slot] = i;
    }
  }

  std::vector<PointSample> out;
  out.reserve(chosen.size());
  for (const std::size_t idx : chosen) out.push_back(points[idx]);
  return out;
}

std::optional<Vec3> estimate_normal(std::span<const Vec3> neighbors) {
  if (neighbors.size() < 3) return std::nullopt;

  Vec3 mean;
  for (const Vec3& p : neighbors) mean += p;
  mean = mean / static_cast<double>(neighbors.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : neighbors) {
    const Vec3 d = p - mean;
    Eigen::Vector3d v(d.x, d.y, d.z);
    cov += v * v.transpose();
  }
  cov /= static_cast<double>(neighbors.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const Eigen::Vector3d evals = solver.eigenvalues();  // ascending
  if (!(evals[2] > 0.0)) return std::nullopt;
  if (evals[1] - evals[0] <= 1e-6 * evals[2]) return std::nullopt;

  const Eigen::Vector3d n = solver.eigenvectors().col(0);
  return normalized(Vec3{n.x(), n.y(), n.z()});
}

SurfelMap build_surfels(std::span<const PointSample> points,
                        const SurfelBuildOptions& options,
                        SurfelBuildStats* stats) {
  const std::vector<PointSample> reps =
      voxel_downsample(points, options.voxel_size);

  std::vector<Vec3> positions;
  positions.reserve(points.size());
  for (const PointSample& p : points) positions.push_back(p.position);
  const KdTree tree(std::move(positions));

  const double radius = options.disk_radius > 0.0
                            ? options.disk_radius
                            : 0.5 * std::sqrt(3.0) * options.voxel_size;

  std::vector<Surfel> candidates(reps.size());
  std::vector<std::uint8_t> valid(reps.size(), 0);

#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(reps.size());
       ++ri) {
    const PointSample& rep = reps[ri];
    const std::vector<std::int32_t> nn = tree.radius_nearest(
        rep.position, options.normal_radius, options.normal_max_neighbors);
    std::vector<Vec3> neighborhood;
    neighborhood.reserve(nn.size());
    for (const std::int32_t idx : nn) neighborhood.push_back(tree.point(idx));

    const std::optional<Vec3> normal = estimate_normal(neighborhood);
    if (!normal) continue;

    Vec3 n = *normal;
    const Vec3 to_sensor = rep.sensor_origin - rep.position;
    if (dot(n, to_sensor) < 0.0) n = -n;

    Surfel s;
    s.center = rep.position;
    s.normal = n;
    s.radius = radius;
    s.orig_intensity = rep.intensity;
    s.orig_range = norm(to_sensor);
    s.orig_incidence =
        incidence_angle(normalized(rep.position - rep.sensor_origin), n);
    s.semantic_class = rep.semantic_class;
    candidates[ri] = s;
    valid[ri] = 1;
  }

  SurfelMap map;
  map.voxel_size = options.voxel_size;
  map.surfels.reserve(reps.size());
  std::size_t dropped = 0;
  for (std::size_t ri = 0; ri < reps.size(); ++ri) {
    if (valid[ri])
      map.surfels.push_back(candidates[ri]);
    else
      ++dropped;
  }
  map.rebuild_index();

  if (stats) {
    stats->input_points = points.size();
    stats->voxel_points = reps.size();
    stats->degenerate_dropped = dropped;
  }
  return map;
}

}  // namespace surfelsim
