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

#include "surfelsim/object_bank.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "surfelsim/errors.hpp"
#include "surfelsim/kdtree.hpp"
#include "surfelsim/map_builder.hpp"
#include "surfelsim/rng.hpp"

namespace surfelsim {

namespace {

Pose label_to_map(const BoxLabel& label) {
  const double c = std::cos(label.heading);
  const double s = std::sin(label.heading);
  return {Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}}, label.center};
}

}  // namespace

std::vector<PointSample> accumulate_object(std::span<const Sweep> sweeps,
                                           std::span<const BoxLabel> labels) {
  if (labels.empty()) throw InputError("object accumulation needs labels");

  std::vector<PointSample> out;
  for (const Sweep& sweep : sweeps) {
    // Nearest label in time; the earlier one wins exact ties.
    std::size_t li = 0;
    double best_dt = std::abs(labels[0].timestamp - sweep.sweep_start);
    for (std::size_t i = 1; i < labels.size(); ++i) {
      const double dt = std::abs(labels[i].timestamp - sweep.sweep_start);
      if (dt < best_dt) {
        best_dt = dt;
        li = i;
      }
    }
    const BoxLabel& label = labels[li];
    const Pose map_to_object = label_to_map(label).inverse();
    const Pose sensor_to_object = map_to_object * sweep.sensor_to_map;
    const Vec3 half = label.dims * 0.5;

    for (const PointSample& p : sweep.points) {
      const Vec3 q = sensor_to_object.apply(p.position);
      if (std::abs(q.x) > half.x || std::abs(q.y) > half.y ||
          std::abs(q.z) > half.z)
        continue;
      PointSample sample = p;
      sample.position = q;
      sample.sensor_origin = sensor_to_object.translation;
      sample.dynamic = false;
      out.push_back(sample);
    }
  }
  if (out.empty())
    throw QualityError("no returns fall inside the object's boxes");
  return out;
}

std::vector<PointSample> mirror_symmetry(
    std::span<const PointSample> object_points) {
  std::vector<PointSample> out;
  out.reserve(2 * object_points.size());
  for (const PointSample& p : object_points) out.push_back(p);
  for (const PointSample& p : object_points) {
    PointSample m = p;
    m.position.y = -m.position.y;
    m.sensor_origin.y = -m.sensor_origin.y;
    out.push_back(m);
  }
  return out;
}

IcpResult icp_refine(std::span<const PointSample> source,
                     std::span<const PointSample> target,
                     const IcpOptions& options) {
  if (source.size() < 3 || target.size() < 3)
    throw InputError("icp needs at least three points on each side");

  std::vector<Vec3> target_positions;
  target_positions.reserve(target.size());
  for (const PointSample& p : target) target_positions.push_back(p.position);
  const KdTree tree(std::move(target_positions));

  const double inv_sigma2 =
      1.0 / (options.intensity_sigma * options.intensity_sigma);

  IcpResult result;
  result.transform = Pose{};

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double weight_sum = 0.0;
    Vec3 mu_s, mu_t;
    std::vector<Vec3> moved(source.size());
    std::vector<std::int32_t> match(source.size());
    std::vector<double> weight(source.size());

    for (std::size_t i = 0; i < source.size(); ++i) {
      moved[i] = result.transform.apply(source[i].position);
      match[i] = tree.nearest(moved[i]);
      const double di =
          source[i].intensity - target[match[i]].intensity;
      weight[i] = std::exp(-di * di * inv_sigma2);
      weight_sum += weight[i];
      mu_s += moved[i] * weight[i];
      mu_t += tree.point(match[i]) * weight[i];
    }
    if (!(weight_sum > 0.0)) break;
    mu_s = mu_s / weight_sum;
    mu_t = mu_t / weight_sum;

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < source.size(); ++i) {
      const Vec3 a = moved[i] - mu_s;
      const Vec3 b = tree.point(match[i]) - mu_t;
      h += weight[i] * Eigen::Vector3d(a.x, a.y, a.z) *
           Eigen::RowVector3d(b.x, b.y, b.z);
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(
        h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) =
        (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0
                                                                        : 1.0;
    const Eigen::Matrix3d r = svd.matrixV() * flip * svd.matrixU().transpose();

    Pose step;
    step.rotation = {{r(0, 0), r(0, 1), r(0, 2), r(1, 0), r(1, 1), r(1, 2),
                      r(2, 0), r(2, 1), r(2, 2)}};
    step.translation = mu_t - step.rotation * mu_s;

    double err = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i)
      err += weight[i] *
             squared_norm(step.apply(moved[i]) - tree.point(match[i]));
    result.residual = std::sqrt(err / weight_sum);

    result.transform = step * result.transform;
    result.iterations = iter + 1;

    const double trace = step.rotation.m[0] + step.rotation.m[4] +
                         step.rotation.m[8];
    const double rot_step =
        std::acos(std::clamp(0.5 * (trace - 1.0), -1.0, 1.0));
    const double trans_step = norm(mu_t - mu_s);
    if (rot_step < options.rotation_tol &&
        trans_step < options.translation_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

ObjectAsset meshify_object(std::span<const PointSample> object_points,
                           const Vec3& dims, std::string source_id,
                           const MeshifyOptions& options) {
  std::vector<Vec3> positions;
  positions.reserve(object_points.size());
  for (const PointSample& p : object_points) positions.push_back(p.position);
  const KdTree tree(std::move(positions));

  const Vec3 half = dims * (0.5 * options.dims_margin);
  std::vector<PointSample> kept;
  for (std::size_t i = 0; i < object_points.size(); ++i) {
    const PointSample& p = object_points[i];
    // radius_search includes the point itself.
    const std::size_t neighbors =
        tree.radius_search(p.position, options.neighbor_radius).size() - 1;
    if (neighbors < options.min_neighbors) continue;
    if (std::abs(p.position.x) > half.x || std::abs(p.position.y) > half.y ||
        std::abs(p.position.z) > half.z)
      continue;
    kept.push_back(p);
  }
  if (kept.size() < options.min_points)
    throw QualityError("too few points survive object reconstruction");

  SurfelBuildOptions build_options;
  build_options.voxel_size = options.voxel_size;
  SurfelMap map = build_surfels(kept, build_options);

  ObjectAsset asset;
  asset.source_id = std::move(source_id);
  asset.dims = dims;
  asset.surfels = std::move(map.surfels);
  for (Surfel& s : asset.surfels) s.semantic_class = SemanticClass::kVehicle;
  return asset;
}

std::size_t select_object(std::span<const ObjectAsset> bank,
                          const Vec3& query_dims, double query_rel_orientation,
                          std::size_t k, std::uint64_t seed) {
  if (bank.empty()) throw ResolutionError("object bank is empty");

  std::vector<std::size_t> order(bank.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> fitness(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const double dim_err = norm(bank[i].dims - query_dims);
    const double ori_err = std::abs(
        wrap_angle(bank[i].rel_orientation - query_rel_orientation));
    fitness[i] = -(dim_err + 0.5 * ori_err);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fitness[a] > fitness[b] || (fitness[a] == fitness[b] && a < b);
  });

  const std::size_t pool = std::max<std::size_t>(
      1, std::min(k, bank.size()));
  SeqRng rng(seed);
  return order[rng.uniform_int(pool)];
}

}  // namespace surfelsim
