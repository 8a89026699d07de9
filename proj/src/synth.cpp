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

#include "surfelsim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "surfelsim/raycast.hpp"
#include "surfelsim/rng.hpp"

namespace surfelsim {

namespace {

Vec3 random_unit(SeqRng& rng) {
  // Uniform on the sphere via z and azimuth.
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, kTwoPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

PointSample sensor_frame_point(const Vec3& map_point, const Vec3& sensor,
                               double intensity, std::int32_t laser,
                               double timestamp, SemanticClass cls,
                               bool dynamic) {
  PointSample p;
  p.position = map_point - sensor;  // identity-rotation sensor frame
  p.intensity = intensity;
  p.laser_id = laser;
  p.timestamp = timestamp;
  p.semantic_class = cls;
  p.dynamic = dynamic;
  p.sensor_origin = {0.0, 0.0, 0.0};
  return p;
}

}  // namespace

std::vector<Sweep> synth_plane_sweeps(const PlaneSceneSpec& spec) {
  std::vector<Sweep> sweeps;
  SeqRng rng(spec.seed);

  for (int si = 0; si < spec.sweeps; ++si) {
    Sweep sweep;
    sweep.sweep_start = 0.1 * si;
    sweep.sensor_to_map = {Mat3::identity(), kPlaneSceneSensor};

    for (int i = 0; i < spec.ground_points; ++i) {
      const double r = std::sqrt(rng.uniform(4.0, 144.0));
      const double phi = rng.uniform(0.0, kTwoPi);
      const Vec3 p{r * std::cos(phi), r * std::sin(phi),
                   spec.noise * rng.normal()};
      sweep.points.push_back(sensor_frame_point(
          p, kPlaneSceneSensor, rng.uniform(0.15, 0.3),
          static_cast<std::int32_t>(rng.uniform_int(64)),
          sweep.sweep_start + rng.uniform(0.0, 0.1), SemanticClass::kRoad,
          false));
    }
    for (int i = 0; i < spec.wall_points; ++i) {
      const Vec3 p{kPlaneSceneWallX + spec.noise * rng.normal(),
                   rng.uniform(-6.0, 6.0), rng.uniform(0.0, 4.0)};
      sweep.points.push_back(sensor_frame_point(
          p, kPlaneSceneSensor, rng.uniform(0.4, 0.6),
          static_cast<std::int32_t>(rng.uniform_int(64)),
          sweep.sweep_start + rng.uniform(0.0, 0.1),
          SemanticClass::kBackground, false));
    }
    // A compact cluster that shifts every sweep, tagged dynamic.
    const Vec3 blob_center{4.0 + 2.0 * si, -3.0, 0.8};
    for (int i = 0; i < spec.dynamic_points; ++i) {
      const Vec3 p = blob_center + Vec3{rng.uniform(-0.8, 0.8),
                                        rng.uniform(-0.4, 0.4),
                                        rng.uniform(-0.6, 0.6)};
      sweep.points.push_back(sensor_frame_point(
          p, kPlaneSceneSensor, rng.uniform(0.6, 0.9),
          static_cast<std::int32_t>(rng.uniform_int(64)),
          sweep.sweep_start + rng.uniform(0.0, 0.1), SemanticClass::kVehicle,
          true));
    }
    sweeps.push_back(std::move(sweep));
  }
  return sweeps;
}

BoxObjectDataset synth_box_object(const BoxObjectSpec& spec) {
  BoxObjectDataset out;
  out.dims = spec.dims;
  SeqRng rng(spec.seed);
  const Vec3 sensor{0.0, 0.0, 1.7};
  const Vec3 half = spec.dims * 0.5;

  for (int si = 0; si < spec.sweeps; ++si) {
    const double t = 0.1 * si;
    const Vec3 center = spec.start_center + t * spec.velocity;
    const double heading = spec.start_heading;
    const Pose object_to_map{rotation_rpy(0.0, 0.0, heading), center};

    Sweep sweep;
    sweep.sweep_start = t;
    sweep.sensor_to_map = {Mat3::identity(), sensor};

    int produced = 0;
    while (produced < spec.points_per_sweep) {
      // Pick one of five faces (no underside), reject sensor-averted ones.
      const int face = static_cast<int>(rng.uniform_int(5));
      Vec3 local, normal;
      switch (face) {
        case 0:
          local = {half.x, rng.uniform(-half.y, half.y),
                   rng.uniform(-half.z, half.z)};
          normal = {1, 0, 0};
          break;
        case 1:
          local = {-half.x, rng.uniform(-half.y, half.y),
                   rng.uniform(-half.z, half.z)};
          normal = {-1, 0, 0};
          break;
        case 2:
          local = {rng.uniform(-half.x, half.x), half.y,
                   rng.uniform(-half.z, half.z)};
          normal = {0, 1, 0};
          break;
        case 3:
          local = {rng.uniform(-half.x, half.x), -half.y,
                   rng.uniform(-half.z, half.z)};
          normal = {0, -1, 0};
          break;
        default:
          local = {rng.uniform(-half.x, half.x),
                   rng.uniform(-half.y, half.y), half.z};
          normal = {0, 0, 1};
          break;
      }
      const Vec3 p_map =
          object_to_map.apply(local + normal * (spec.surface_noise *
                                                rng.normal()));
      const Vec3 n_map = object_to_map.rotation * normal;
      if (dot(n_map, sensor - p_map) <= 0.0) continue;  // facing away

      // Face-dependent intensity keeps matched points at matched levels.
      const double base = 0.2 + 0.15 * face;
      sweep.points.push_back(sensor_frame_point(
          p_map, sensor, std::clamp(base + 0.02 * rng.normal(), 0.05, 0.95),
          static_cast<std::int32_t>(rng.uniform_int(64)),
          t + rng.uniform(0.0, 0.1), SemanticClass::kVehicle, true));
      ++produced;
    }

    BoxLabel label;
    label.center = center + Vec3{spec.label_position_noise * rng.normal(),
                                 spec.label_position_noise * rng.normal(),
                                 0.2 * spec.label_position_noise *
                                     rng.normal()};
    label.heading = heading + spec.label_heading_noise * rng.normal();
    label.dims = spec.dims;
    label.timestamp = t;
    out.labels.push_back(label);
    out.sweeps.push_back(std::move(sweep));
  }
  return out;
}

ObjectAsset synth_box_asset(const std::string& source_id, const Vec3& dims,
                            double spacing, std::uint64_t seed) {
  SeqRng rng(seed);
  ObjectAsset asset;
  asset.source_id = source_id;
  asset.dims = dims;
  asset.rel_orientation = 0.0;
  const Vec3 half = dims * 0.5;
  const double radius = 0.75 * spacing;

  const auto add = [&](const Vec3& center, const Vec3& normal) {
    Surfel s;
    s.center = center;
    s.normal = normal;
    s.radius = radius;
    s.orig_intensity = std::clamp(0.35 + 0.05 * rng.normal(), 0.05, 0.95);
    s.orig_range = 12.0;
    s.orig_incidence = 0.3;
    s.semantic_class = SemanticClass::kVehicle;
    asset.surfels.push_back(s);
  };

  const auto steps = [&](double extent) {
    return std::max(1, static_cast<int>(std::floor(extent / spacing)));
  };
  const int nx = steps(dims.x), ny = steps(dims.y), nz = steps(dims.z);
  const auto coord = [](double half_extent, int i, int n) {
    return -half_extent + (i + 0.5) * (2.0 * half_extent / n);
  };

  for (int iy = 0; iy < ny; ++iy)
    for (int iz = 0; iz < nz; ++iz) {
      add({half.x, coord(half.y, iy, ny), coord(half.z, iz, nz)}, {1, 0, 0});
      add({-half.x, coord(half.y, iy, ny), coord(half.z, iz, nz)},
          {-1, 0, 0});
    }
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      add({coord(half.x, ix, nx), half.y, coord(half.z, iz, nz)}, {0, 1, 0});
      add({coord(half.x, ix, nx), -half.y, coord(half.z, iz, nz)},
          {0, -1, 0});
    }
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      add({coord(half.x, ix, nx), coord(half.y, iy, ny), half.z}, {0, 0, 1});
  return asset;
}

SurfelMap synth_street_map(std::size_t target_surfels, std::uint64_t seed) {
  SeqRng rng(seed);
  SurfelMap map;

  // Wall segments: ~40% of the frontage on both sides carries a building.
  struct Wall {
    double x0, x1, y, height;
  };
  std::vector<Wall> walls;
  double wall_area = 0.0;
  for (const double side : {-12.0, 12.0}) {
    double x = -100.0;
    while (x < 100.0) {
      const double gap = rng.uniform(8.0, 20.0);
      const double len = rng.uniform(6.0, 16.0);
      const double height = rng.uniform(3.0, 7.0);
      const double x0 = x + gap;
      const double x1 = std::min(100.0, x0 + len);
      if (x0 < 100.0 && x1 > x0) {
        walls.push_back({x0, x1, side, height});
        wall_area += (x1 - x0) * height;
      }
      x = x1;
    }
  }

  const double ground_area = 200.0 * 24.0;
  const double spacing =
      std::sqrt((ground_area + wall_area) /
                static_cast<double>(std::max<std::size_t>(1, target_surfels)));
  const double radius = 0.5 * std::sqrt(3.0) * spacing;
  const Vec3 scan_origin{0.0, 0.0, 1.8};

  const auto add = [&](const Vec3& center, Vec3 normal, double intensity,
                       SemanticClass cls) {
    if (dot(normal, scan_origin - center) < 0.0) normal = -normal;
    Surfel s;
    s.center = center;
    s.normal = normal;
    s.radius = radius;
    s.orig_intensity = intensity;
    s.orig_range = norm(center - scan_origin);
    s.orig_incidence =
        incidence_angle(normalized(center - scan_origin), normal);
    s.semantic_class = cls;
    map.surfels.push_back(s);
  };

  const int gx = static_cast<int>(200.0 / spacing);
  const int gy = static_cast<int>(24.0 / spacing);
  for (int ix = 0; ix < gx; ++ix)
    for (int iy = 0; iy < gy; ++iy)
      add({-100.0 + (ix + 0.5) * spacing, -12.0 + (iy + 0.5) * spacing,
           0.002 * rng.normal()},
          {0, 0, 1}, 0.22 + 0.03 * rng.next_u01(), SemanticClass::kRoad);

  for (const Wall& wall : walls) {
    const int nx = std::max(1, static_cast<int>((wall.x1 - wall.x0) / spacing));
    const int nz = std::max(1, static_cast<int>(wall.height / spacing));
    const Vec3 normal{0.0, wall.y < 0.0 ? 1.0 : -1.0, 0.0};
    for (int ix = 0; ix < nx; ++ix)
      for (int iz = 0; iz < nz; ++iz)
        add({wall.x0 + (ix + 0.5) * spacing, wall.y + 0.002 * rng.normal(),
             (iz + 0.5) * spacing},
            normal, 0.4 + 0.1 * rng.next_u01(), SemanticClass::kBackground);
  }

  // A few poles near the kerb.
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(-95.0, 95.0);
    const double y = rng.uniform(0.0, 1.0) < 0.5 ? -10.0 : 10.0;
    for (double z = 0.1; z < 4.0; z += spacing) {
      const double phi = rng.uniform(0.0, kTwoPi);
      add({x + 0.06 * std::cos(phi), y + 0.06 * std::sin(phi), z},
          {std::cos(phi), std::sin(phi), 0.0}, 0.5,
          SemanticClass::kBackground);
    }
  }

  map.voxel_size = spacing;
  map.rebuild_index();
  return map;
}

Scenario synth_street_scenario(const std::string& map_path, int actors,
                               std::uint64_t seed) {
  SeqRng rng(seed);
  Scenario scenario;
  scenario.map_path = map_path;
  scenario.seed = seed;
  scenario.sweep_start = 0.0;
  scenario.sweep_period = 0.1;

  const auto straight = [&](const Vec3& start, const Vec3& velocity,
                            double heading, double duration) {
    Trajectory trajectory;
    trajectory.samples.push_back(
        {0.0, {rotation_rpy(0.0, 0.0, heading), start}});
    trajectory.samples.push_back(
        {duration,
         {rotation_rpy(0.0, 0.0, heading), start + duration * velocity}});
    return trajectory;
  };

  scenario.sdv_trajectory =
      straight({-20.0, 0.0, 1.8}, {10.0, 0.0, 0.0}, 0.0, 1.0);

  for (int i = 0; i < actors; ++i) {
    ActorPlacement placement;
    placement.asset_id = fmt::format("car{}", i);
    const double lane = i % 2 == 0 ? 3.0 : -3.0;
    const double speed = rng.uniform(5.0, 14.0);
    const double heading = lane > 0.0 ? 0.0 : kPi;
    placement.trajectory = straight(
        {rng.uniform(-10.0, 25.0), lane, 0.75},
        {lane > 0.0 ? speed : -speed, 0.0, 0.0}, heading, 1.0);
    scenario.actors.push_back(placement);
  }
  return scenario;
}

RandomScene synth_random_scene(const RandomSceneSpec& spec) {
  SeqRng rng(spec.seed);
  RandomScene out;

  // Static soup: an annulus of disks around the origin with a sprinkle of
  // close-in surfels that stress the minimum range and the exclusion box.
  out.map.voxel_size = 0.04;
  for (std::size_t i = 0; i < spec.surfels; ++i) {
    Surfel s;
    const bool near = rng.next_u01() < 0.03;
    const double r = near ? rng.uniform(0.2, 2.5) : rng.uniform(2.5, 60.0);
    const double phi = rng.uniform(0.0, kTwoPi);
    const double z = near ? rng.uniform(0.5, 2.5) : rng.uniform(-1.0, 7.0);
    s.center = {r * std::cos(phi), r * std::sin(phi), z};
    s.normal = random_unit(rng);
    s.radius = rng.uniform(0.03, 0.25);
    s.orig_intensity = rng.next_u01();
    s.orig_range = rng.uniform(1.0, 60.0);
    s.orig_incidence = rng.uniform(0.0, 0.5 * kPi);
    const double cls = rng.next_u01();
    s.semantic_class = cls < 0.5 ? SemanticClass::kBackground
                       : cls < 0.8 ? SemanticClass::kRoad
                                   : SemanticClass::kVehicle;
    out.map.surfels.push_back(s);
  }
  out.map.rebuild_index();

  out.scenario.seed = spec.seed;
  out.scenario.sweep_start = rng.uniform(0.0, 0.05);
  out.scenario.sweep_period = 0.1;

  Trajectory sdv;
  const Vec3 sdv_start{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                       rng.uniform(1.5, 2.0)};
  const Vec3 sdv_vel{rng.uniform(-15.0, 15.0), rng.uniform(-6.0, 6.0), 0.0};
  const Vec3 rpy0{rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03),
                  rng.uniform(0.0, kTwoPi)};
  sdv.samples.push_back(
      {0.0, {rotation_rpy(rpy0.x, rpy0.y, rpy0.z), sdv_start}});
  sdv.samples.push_back(
      {0.3,
       {rotation_rpy(rpy0.x, rpy0.y, rpy0.z + rng.uniform(-0.2, 0.2)),
        sdv_start + 0.3 * sdv_vel}});
  out.scenario.sdv_trajectory = sdv;

  for (int ai = 0; ai < spec.actors; ++ai) {
    const Vec3 dims{rng.uniform(3.5, 5.0), rng.uniform(1.6, 2.0),
                    rng.uniform(1.4, 1.8)};
    const double spacing =
        std::sqrt(2.0 * (dims.x * dims.y + dims.x * dims.z +
                         dims.y * dims.z) /
                  std::max(1, spec.actor_surfel_target));
    out.bank.push_back(synth_box_asset(fmt::format("actor{}", ai), dims,
                                       spacing, rng.next_u64()));

    ActorPlacement placement;
    placement.asset_id = out.bank.back().source_id;
    const double phi = rng.uniform(0.0, kTwoPi);
    const double dist = rng.uniform(4.0, 30.0);
    const Vec3 start{dist * std::cos(phi), dist * std::sin(phi),
                     rng.uniform(0.5, 1.2)};
    const Vec3 vel{rng.uniform(-15.0, 15.0), rng.uniform(-15.0, 15.0), 0.0};
    const double yaw = rng.uniform(0.0, kTwoPi);
    const int n_samples = 2 + static_cast<int>(rng.uniform_int(3));
    for (int k = 0; k < n_samples; ++k) {
      const double t = 0.25 * k / std::max(1, n_samples - 1);
      placement.trajectory.samples.push_back(
          {t,
           {rotation_rpy(0.0, 0.0, yaw + 0.3 * t * rng.next_u01()),
            start + t * vel}});
    }
    out.scenario.actors.push_back(placement);
  }
  return out;
}

RaydropFixture synth_raydrop_fixture(int n_pairs, std::uint64_t seed,
                                     double drop_incidence_deg) {
  RaydropFixture fixture;
  const double threshold = drop_incidence_deg * kPi / 180.0;
  const SensorIntrinsics intr = SensorIntrinsics::default64();

  for (int i = 0; i < n_pairs; ++i) {
    RandomSceneSpec spec;
    spec.seed = counter_hash(seed, static_cast<std::uint64_t>(i));
    spec.surfels = 2500;
    spec.actors = 1;
    RandomScene rs = synth_random_scene(spec);
    const Scene scene = compose(rs.scenario, rs.map, rs.bank);
    const HitImage hits =
        cast_sweep(scene, intr, rs.scenario.sweep_start);
    Grid sim = project(hits);

    Grid real = Grid::zeros(1, sim.rows, sim.cols);
    for (std::int32_t r = 0; r < sim.rows; ++r)
      for (std::int32_t c = 0; c < sim.cols; ++c)
        real.at(0, r, c) =
            sim.at(channel::kOccupancy, r, c) != 0.0f &&
                    sim.at(channel::kIncidence, r, c) <= threshold
                ? 1.0f
                : 0.0f;

    fixture.sim.push_back(std::move(sim));
    fixture.real_occupancy.push_back(std::move(real));
  }
  return fixture;
}

}  // namespace surfelsim
