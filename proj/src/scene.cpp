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

#include "surfelsim/scene.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <fmt/format.h>

#include "surfelsim/errors.hpp"

namespace surfelsim {

namespace {

void check_trajectory(const Trajectory& trajectory, const char* what) {
  if (trajectory.samples.empty())
    throw InputError(fmt::format("{} trajectory is empty", what));
  for (std::size_t i = 1; i < trajectory.samples.size(); ++i) {
    if (!(trajectory.samples[i].t > trajectory.samples[i - 1].t))
      throw InputError(
          fmt::format("{} trajectory timestamps must strictly increase",
                      what));
  }
}

Eigen::Quaterniond to_quat(const Mat3& r) {
  Eigen::Matrix3d m;
  m << r.m[0], r.m[1], r.m[2], r.m[3], r.m[4], r.m[5], r.m[6], r.m[7], r.m[8];
  return Eigen::Quaterniond(m);
}

Mat3 to_mat3(const Eigen::Quaterniond& q) {
  const Eigen::Matrix3d m = q.toRotationMatrix();
  return {{m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0),
           m(2, 1), m(2, 2)}};
}

}  // namespace

Pose pose_at(const Trajectory& trajectory, double t) {
  check_trajectory(trajectory, "query");
  const auto& samples = trajectory.samples;
  if (t <= samples.front().t) return samples.front().pose;
  if (t >= samples.back().t) return samples.back().pose;

  std::size_t hi = 1;
  while (samples[hi].t <= t) ++hi;
  const TrajectorySample& a = samples[hi - 1];
  const TrajectorySample& b = samples[hi];
  const double u = (t - a.t) / (b.t - a.t);

  Pose out;
  out.translation = a.pose.translation * (1.0 - u) + b.pose.translation * u;
  // slerp takes the shorter arc regardless of quaternion sign.
  out.rotation =
      to_mat3(to_quat(a.pose.rotation).slerp(u, to_quat(b.pose.rotation)));
  return out;
}

Vec3 velocity_at(const Trajectory& trajectory, double t) {
  check_trajectory(trajectory, "query");
  const auto& samples = trajectory.samples;
  if (samples.size() < 2) return {};
  if (t < samples.front().t || t >= samples.back().t) return {};
  std::size_t hi = 1;
  while (samples[hi].t <= t) ++hi;
  const TrajectorySample& a = samples[hi - 1];
  const TrajectorySample& b = samples[hi];
  return (b.pose.translation - a.pose.translation) / (b.t - a.t);
}

Scene compose(const Scenario& scenario, const SurfelMap& map,
              std::span<const ObjectAsset> bank) {
  check_trajectory(scenario.sdv_trajectory, "sdv");

  Scene scene;
  scene.map = &map;
  scene.sdv_trajectory = scenario.sdv_trajectory;
  scene.sdv_exclusion_box = scenario.sdv_exclusion_box;

  Vec3 lo{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  for (const Surfel& s : map.surfels) {
    lo = {std::min(lo.x, s.center.x), std::min(lo.y, s.center.y),
          std::min(lo.z, s.center.z)};
    hi = {std::max(hi.x, s.center.x), std::max(hi.y, s.center.y),
          std::max(hi.z, s.center.z)};
  }

  if (!map.surfels.empty()) {
    for (const TrajectorySample& sample : scenario.sdv_trajectory.samples) {
      const Vec3& p = sample.pose.translation;
      if (p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y ||
          p.z < lo.z - 5.0 || p.z > hi.z + 5.0) {
        scene.warnings.push_back(
            fmt::format("sdv leaves the map bounds at t={:.3f}", sample.t));
        break;
      }
    }
  }

  for (const ActorPlacement& placement : scenario.actors) {
    check_trajectory(placement.trajectory, placement.asset_id.c_str());

    const ObjectAsset* asset = nullptr;
    for (const ObjectAsset& candidate : bank) {
      if (candidate.source_id == placement.asset_id) {
        asset = &candidate;
        break;
      }
    }
    if (!asset)
      throw ResolutionError(
          fmt::format("asset '{}' not found in the bank", placement.asset_id));

    if (!map.surfels.empty()) {
      for (const TrajectorySample& sample : placement.trajectory.samples) {
        const Vec3& p = sample.pose.translation;
        if (p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y ||
            p.z < lo.z - 5.0 || p.z > hi.z + 5.0) {
          scene.warnings.push_back(fmt::format(
              "actor '{}' leaves the map bounds at t={:.3f}",
              placement.asset_id, sample.t));
          break;
        }
      }
    }

    scene.actors.push_back({asset, placement.trajectory});
  }
  return scene;
}

}  // namespace surfelsim
