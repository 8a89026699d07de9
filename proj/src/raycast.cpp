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

#include "surfelsim/raycast.hpp"

#include <algorithm>
#include <cmath>

#include "surfelsim/errors.hpp"

namespace surfelsim {

SensorIntrinsics SensorIntrinsics::default64() {
  SensorIntrinsics intr;
  intr.elevations.resize(64);
  const double top = 2.0 * kPi / 180.0;
  const double bottom = -24.9 * kPi / 180.0;
  for (int i = 0; i < 64; ++i)
    intr.elevations[i] = top + (bottom - top) * i / 63.0;
  return intr;
}

void SensorIntrinsics::validate() const {
  if (n_beams <= 0 || n_cols <= 0)
    throw InputError("sensor must have positive beam and column counts");
  if (static_cast<std::int32_t>(elevations.size()) != n_beams)
    throw InputError("elevation table size does not match beam count");
  for (std::size_t i = 1; i < elevations.size(); ++i)
    if (!(elevations[i] < elevations[i - 1]))
      throw InputError("beam elevations must strictly descend");
  if (spin_direction != 1 && spin_direction != -1)
    throw InputError("spin direction must be +1 or -1");
  if (!(sweep_period > 0.0)) throw InputError("sweep period must be positive");
  if (!(min_range >= 0.0)) throw InputError("min range must be non-negative");
}

RayImage generate_rays(const SensorIntrinsics& intrinsics,
                       const Trajectory& sdv_trajectory, double sweep_start) {
  intrinsics.validate();

  const Pose start_pose = pose_at(sdv_trajectory, sweep_start);
  const Vec3 c0 = start_pose.translation;
  const Vec3 v0 = velocity_at(sdv_trajectory, sweep_start);
  const Mat3& r0 = start_pose.rotation;

  RayImage image;
  image.rows = intrinsics.n_beams;
  image.cols = intrinsics.n_cols;
  image.sweep_start = sweep_start;
  image.rays.resize(static_cast<std::size_t>(image.rows) * image.cols);

  std::vector<double> cos_elev(intrinsics.n_beams), sin_elev(intrinsics.n_beams);
  for (std::int32_t i = 0; i < intrinsics.n_beams; ++i) {
    cos_elev[i] = std::cos(intrinsics.elevations[i]);
    sin_elev[i] = std::sin(intrinsics.elevations[i]);
  }

  for (std::int32_t j = 0; j < intrinsics.n_cols; ++j) {
    const double dt = static_cast<double>(j) / intrinsics.n_cols *
                      intrinsics.sweep_period;
    const Vec3 origin = c0 + dt * v0;
    const double phi = intrinsics.azimuth_start +
                       intrinsics.spin_direction * kTwoPi *
                           static_cast<double>(j) / intrinsics.n_cols;
    const double cos_phi = std::cos(phi);
    const double sin_phi = std::sin(phi);
    for (std::int32_t i = 0; i < intrinsics.n_beams; ++i) {
      Ray& ray = image.rays[static_cast<std::size_t>(i) * image.cols + j];
      ray.origin = origin;
      ray.direction = r0 * Vec3{cos_elev[i] * cos_phi, cos_elev[i] * sin_phi,
                                sin_elev[i]};
      ray.time_offset = dt;
      ray.laser_row = i;
      ray.azimuth_col = j;
    }
  }
  return image;
}

bool sdv_box_masks_return(const Pose& box_to_map, const Vec3& box_dims,
                          const Vec3& origin, const Vec3& direction,
                          double range) {
  const Pose map_to_box = box_to_map.inverse();
  const Vec3 o = map_to_box.apply(origin);
  const Vec3 d = map_to_box.rotation * direction;
  const double half[3] = {0.5 * box_dims.x, 0.5 * box_dims.y,
                          0.5 * box_dims.z};
  const double oc[3] = {o.x, o.y, o.z};
  const double dc[3] = {d.x, d.y, d.z};

  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dc[a] == 0.0) {
      if (oc[a] < -half[a] || oc[a] > half[a]) return false;
      continue;
    }
    double t0 = (-half[a] - oc[a]) / dc[a];
    double t1 = (half[a] - oc[a]) / dc[a];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return false;
  }

  if (t_exit < 0.0) return false;  // box entirely behind the ray
  if (t_enter > 0.0) return t_enter <= range;  // box ahead of the sensor
  // Sensor inside the box: only returns that end before leaving it are
  // self-returns.
  return range <= t_exit;
}

HitImage cast_sweep(const Scene& scene, const SensorIntrinsics& intrinsics,
                    double sweep_start) {
  if (!scene.map) throw InputError("scene has no map");
  const SurfelMap& map = *scene.map;

  HitImage image;
  image.rays = generate_rays(intrinsics, scene.sdv_trajectory, sweep_start);
  image.rows = image.rays.rows;
  image.cols = image.rays.cols;
  image.sweep_start = sweep_start;
  image.cells.assign(static_cast<std::size_t>(image.rows) * image.cols,
                     HitCell{});

  // Column firing times decide the actor pose interval and the exclusion
  // box pose; both are shared by all rows of a column.
  std::vector<std::int32_t> col_interval(image.cols);
  std::vector<Pose> col_sdv_pose(image.cols);
  std::vector<std::int32_t> interval_slot(kActorPoseIntervals, -1);
  std::vector<std::int32_t> used_intervals;
  for (std::int32_t j = 0; j < image.cols; ++j) {
    const double dt = image.rays.at(0, j).time_offset;
    const std::int32_t k = actor_interval(dt, intrinsics.sweep_period);
    col_interval[j] = k;
    if (interval_slot[k] < 0) {
      interval_slot[k] = static_cast<std::int32_t>(used_intervals.size());
      used_intervals.push_back(k);
    }
    col_sdv_pose[j] = pose_at(scene.sdv_trajectory, sweep_start + dt);
  }

  // Actors frozen per interval: transformed surfel copies plus their own
  // trees, built once and shared read-only by the ray loop.
  struct ActorInterval {
    std::vector<Surfel> surfels;
    Bvh bvh;
  };
  const std::size_t n_actors = scene.actors.size();
  std::vector<ActorInterval> frozen(n_actors * used_intervals.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t fi = 0; fi < static_cast<std::int64_t>(frozen.size());
       ++fi) {
    const std::size_t ai = fi / used_intervals.size();
    const std::int32_t k = used_intervals[fi % used_intervals.size()];
    const SceneActor& actor = scene.actors[ai];
    const Pose pose =
        pose_at(actor.trajectory,
                actor_interval_time(sweep_start, k, intrinsics.sweep_period));
    ActorInterval& slot = frozen[fi];
    slot.surfels.reserve(actor.asset->surfels.size());
    for (const Surfel& s : actor.asset->surfels) {
      Surfel t = s;
      t.center = pose.apply(s.center);
      t.normal = pose.rotation * s.normal;
      slot.surfels.push_back(t);
    }
    slot.bvh.build(slot.surfels);
  }

  const std::int64_t total =
      static_cast<std::int64_t>(image.rows) * image.cols;

#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t ri = 0; ri < total; ++ri) {
    const Ray& ray = image.rays.rays[ri];
    const std::int32_t j = ray.azimuth_col;

    SurfelHitRecord best;
    map.index.closest_hit(map.surfels, ray.origin, ray.direction,
                          intrinsics.min_range, 0, best);
    for (std::size_t ai = 0; ai < n_actors; ++ai) {
      const ActorInterval& slot =
          frozen[ai * used_intervals.size() + interval_slot[col_interval[j]]];
      slot.bvh.closest_hit(slot.surfels, ray.origin, ray.direction,
                           intrinsics.min_range,
                           static_cast<std::int32_t>(ai) + 1, best);
    }
    if (!best.valid()) continue;

    HitCell& cell = image.cells[ri];
    if (sdv_box_masks_return(col_sdv_pose[j], scene.sdv_exclusion_box,
                             ray.origin, ray.direction, best.t)) {
      cell.sdv_masked = true;
      continue;
    }
    cell.hit = true;
    cell.actor = best.group - 1;
    cell.surfel = best.index;
    cell.range = best.t;
    cell.incidence = incidence_angle(ray.direction, best.surfel->normal);
    cell.orig_intensity = best.surfel->orig_intensity;
    cell.orig_range = best.surfel->orig_range;
    cell.orig_incidence = best.surfel->orig_incidence;
    cell.semantic_class = best.surfel->semantic_class;
  }
  return image;
}

}  // namespace surfelsim
