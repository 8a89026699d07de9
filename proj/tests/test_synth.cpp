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

#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "surfelsim/raycast.hpp"
#include "surfelsim/synth.hpp"

using namespace surfelsim;

TEST_SUITE_BEGIN("synth");

TEST_CASE("plane sweeps follow the requested counts and layering") {
  PlaneSceneSpec spec;
  spec.sweeps = 2;
  spec.ground_points = 300;
  spec.wall_points = 200;
  spec.dynamic_points = 50;
  spec.seed = 5;
  const std::vector<Sweep> sweeps = synth_plane_sweeps(spec);

  REQUIRE(sweeps.size() == 2);
  CHECK(sweeps[0].sweep_start == 0.0);
  CHECK(sweeps[1].sweep_start == 0.1);
  for (const Sweep& sweep : sweeps) {
    REQUIRE(sweep.points.size() == 550);
    CHECK(sweep.sensor_to_map.rotation == Mat3::identity());
    CHECK(sweep.sensor_to_map.translation == kPlaneSceneSensor);
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
      const PointSample& p = sweep.points[i];
      const Vec3 map_point = sweep.sensor_to_map.apply(p.position);
      CHECK(p.laser_id >= 0);
      CHECK(p.laser_id < 64);
      CHECK(p.timestamp >= sweep.sweep_start);
      CHECK(p.timestamp <= sweep.sweep_start + 0.1);
      if (i < 300) {
        CHECK(p.semantic_class == SemanticClass::kRoad);
        CHECK(!p.dynamic);
        CHECK(std::abs(map_point.z) < 0.02);
      } else if (i < 500) {
        CHECK(p.semantic_class == SemanticClass::kBackground);
        CHECK(!p.dynamic);
        CHECK(std::abs(map_point.x - kPlaneSceneWallX) < 0.02);
      } else {
        CHECK(p.semantic_class == SemanticClass::kVehicle);
        CHECK(p.dynamic);
      }
    }
  }

  // The dynamic blob moves between sweeps; static structure does not.
  const Vec3 blob0 = sweeps[0].points[540].position;
  const Vec3 blob1 = sweeps[1].points[540].position;
  CHECK(std::abs(blob0.x - 4.0) < 2.0);
  CHECK(std::abs(blob1.x - 6.0) < 2.0);

  // Seeded generation replays exactly.
  const std::vector<Sweep> again = synth_plane_sweeps(spec);
  CHECK(again[1].points[17].position == sweeps[1].points[17].position);
  CHECK(again[1].points[17].timestamp == sweeps[1].points[17].timestamp);
}

TEST_CASE("box object points sit on sensor-facing faces") {
  BoxObjectSpec spec;
  spec.sweeps = 3;
  spec.points_per_sweep = 400;
  spec.velocity = {2.0, 0.0, 0.0};
  spec.surface_noise = 0.0;  // exact faces, so membership is decidable
  const BoxObjectDataset data = synth_box_object(spec);

  REQUIRE(data.sweeps.size() == 3);
  REQUIRE(data.labels.size() == 3);
  CHECK(data.dims == spec.dims);
  const Vec3 half = spec.dims * 0.5;
  const Vec3 sensor = data.sweeps[0].sensor_to_map.translation;

  for (std::size_t si = 0; si < data.sweeps.size(); ++si) {
    const BoxLabel& label = data.labels[si];
    CHECK(label.timestamp == 0.1 * static_cast<double>(si));
    CHECK(label.heading == spec.start_heading);
    CHECK(label.dims == spec.dims);
    CHECK(label.center.x ==
          doctest::Approx(8.0 + 0.2 * static_cast<double>(si)));

    const Pose object_to_map{rotation_rpy(0.0, 0.0, label.heading),
                             label.center};
    const Pose map_to_object = object_to_map.inverse();
    REQUIRE(data.sweeps[si].points.size() == 400);
    for (const PointSample& p : data.sweeps[si].points) {
      CHECK(p.dynamic);
      CHECK(p.semantic_class == SemanticClass::kVehicle);
      const Vec3 map_point = data.sweeps[si].sensor_to_map.apply(p.position);
      const Vec3 local = map_to_object.apply(map_point);

      // Exactly one coordinate pinned to a face, never the underside.
      Vec3 normal{0.0, 0.0, 0.0};
      int pinned = 0;
      if (std::abs(std::abs(local.x) - half.x) < 1e-9) {
        normal = {local.x > 0.0 ? 1.0 : -1.0, 0.0, 0.0};
        ++pinned;
      }
      if (std::abs(std::abs(local.y) - half.y) < 1e-9) {
        normal = {0.0, local.y > 0.0 ? 1.0 : -1.0, 0.0};
        ++pinned;
      }
      if (std::abs(local.z - half.z) < 1e-9) {
        normal = {0.0, 0.0, 1.0};
        ++pinned;
      }
      CHECK(pinned >= 1);
      CHECK(local.z > -half.z + 1e-9);
      CHECK(std::abs(local.x) <= half.x + 1e-9);
      CHECK(std::abs(local.y) <= half.y + 1e-9);
      CHECK(local.z <= half.z + 1e-9);

      // The sampled face looks toward the sensor.
      const Vec3 n_map = object_to_map.rotation * normal;
      CHECK(dot(n_map, sensor - map_point) > 0.0);
    }
  }
}

TEST_CASE("box asset tiles all faces except the underside") {
  const Vec3 dims{4.0, 2.0, 1.0};
  const ObjectAsset asset = synth_box_asset("box", dims, 0.5, 7);
  CHECK(asset.source_id == "box");
  CHECK(asset.dims == dims);
  CHECK(asset.rel_orientation == 0.0);

  // nx=8, ny=4, nz=2 tiles: sides 2*(4*2) + 2*(8*2), top 8*4.
  REQUIRE(asset.surfels.size() == 80);

  std::map<std::tuple<int, int, int>, int> by_normal;
  const Vec3 half = dims * 0.5;
  for (const Surfel& s : asset.surfels) {
    CHECK(s.semantic_class == SemanticClass::kVehicle);
    CHECK(s.radius == 0.75 * 0.5);
    CHECK(norm(s.normal) == doctest::Approx(1.0));
    // Outward unit normal along one axis, centre pinned to that face.
    const int key_x = static_cast<int>(std::lround(s.normal.x));
    const int key_y = static_cast<int>(std::lround(s.normal.y));
    const int key_z = static_cast<int>(std::lround(s.normal.z));
    ++by_normal[{key_x, key_y, key_z}];
    CHECK(dot(s.normal, s.center) ==
          doctest::Approx(std::abs(dot(s.normal, half))));
    CHECK(std::abs(s.center.x) <= half.x);
    CHECK(std::abs(s.center.y) <= half.y);
    CHECK(s.center.z <= half.z);
    CHECK(s.center.z >= -half.z);
  }
  CHECK(by_normal[{1, 0, 0}] == 8);
  CHECK(by_normal[{-1, 0, 0}] == 8);
  CHECK(by_normal[{0, 1, 0}] == 16);
  CHECK(by_normal[{0, -1, 0}] == 16);
  CHECK(by_normal[{0, 0, 1}] == 32);
  CHECK(by_normal.count({0, 0, -1}) == 0);
}

TEST_CASE("street map lands near the surfel target") {
  const SurfelMap map = synth_street_map(20000, 3);
  const double count = static_cast<double>(map.surfels.size());
  CHECK(count > 20000.0 * 0.9);
  CHECK(count < 20000.0 * 1.1);
  CHECK(map.voxel_size > 0.0);
  CHECK(map.index.size() == map.surfels.size());

  const Vec3 scan_origin{0.0, 0.0, 1.8};
  bool saw_road = false, saw_background = false;
  for (const Surfel& s : map.surfels) {
    saw_road |= s.semantic_class == SemanticClass::kRoad;
    saw_background |= s.semantic_class == SemanticClass::kBackground;
    CHECK(dot(s.normal, scan_origin - s.center) >= 0.0);
    CHECK(s.orig_range == norm(s.center - scan_origin));
    CHECK(s.orig_incidence ==
          incidence_angle(normalized(s.center - scan_origin), s.normal));
  }
  CHECK(saw_road);
  CHECK(saw_background);
}

TEST_CASE("street scenario drives the lane layout") {
  const Scenario scenario = synth_street_scenario("street.lsrf", 3, 11);
  CHECK(scenario.map_path == "street.lsrf");
  CHECK(scenario.seed == 11);
  CHECK(scenario.sweep_period == 0.1);

  REQUIRE(scenario.sdv_trajectory.samples.size() == 2);
  CHECK(scenario.sdv_trajectory.samples[0].pose.translation ==
        Vec3{-20.0, 0.0, 1.8});
  CHECK(scenario.sdv_trajectory.samples[1].t == 1.0);
  CHECK(scenario.sdv_trajectory.samples[1].pose.translation ==
        Vec3{-10.0, 0.0, 1.8});

  REQUIRE(scenario.actors.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const ActorPlacement& actor = scenario.actors[i];
    CHECK(actor.asset_id == "car" + std::to_string(i));
    const double lane = i % 2 == 0 ? 3.0 : -3.0;
    const Vec3 p0 = actor.trajectory.samples[0].pose.translation;
    const Vec3 p1 = actor.trajectory.samples[1].pose.translation;
    CHECK(p0.y == lane);
    // Traffic on the far lane flows the other way.
    CHECK((lane > 0.0 ? p1.x - p0.x : p0.x - p1.x) > 0.0);
  }
}

TEST_CASE("random scene wires actors to bank assets") {
  const RandomScene scene = synth_random_scene({.seed = 21, .surfels = 80,
                                                .actors = 2});
  CHECK(scene.map.surfels.size() == 80);
  CHECK(scene.map.index.size() == 80);
  REQUIRE(scene.bank.size() == 2);
  REQUIRE(scene.scenario.actors.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(scene.bank[i].source_id == scene.scenario.actors[i].asset_id);
    CHECK(!scene.bank[i].surfels.empty());
    const Trajectory& trajectory = scene.scenario.actors[i].trajectory;
    REQUIRE(trajectory.samples.size() >= 2);
    for (std::size_t k = 1; k < trajectory.samples.size(); ++k)
      CHECK(trajectory.samples[k].t > trajectory.samples[k - 1].t);
  }
  REQUIRE(scene.scenario.sdv_trajectory.samples.size() == 2);

  // compose accepts its own output.
  const Scene composed = compose(scene.scenario, scene.map, scene.bank);
  CHECK(composed.actors.size() == 2);
}

TEST_CASE("raydrop fixture applies the incidence rule exactly") {
  const RaydropFixture fixture = synth_raydrop_fixture(2, 31, 55.0);
  REQUIRE(fixture.sim.size() == 2);
  REQUIRE(fixture.real_occupancy.size() == 2);
  const double threshold = 55.0 * kPi / 180.0;

  for (std::size_t i = 0; i < fixture.sim.size(); ++i) {
    const Grid& sim = fixture.sim[i];
    const Grid& real = fixture.real_occupancy[i];
    CHECK(sim.channels == 8);
    CHECK(real.channels == 1);
    CHECK(sim.rows == real.rows);
    CHECK(sim.cols == real.cols);

    std::size_t kept = 0, dropped = 0;
    for (std::int32_t r = 0; r < sim.rows; ++r) {
      for (std::int32_t c = 0; c < sim.cols; ++c) {
        const bool occupied = sim.at(channel::kOccupancy, r, c) != 0.0f;
        const bool keep =
            occupied && sim.at(channel::kIncidence, r, c) <= threshold;
        CHECK(real.at(0, r, c) == (keep ? 1.0f : 0.0f));
        if (occupied) (keep ? kept : dropped) += 1;
      }
    }
    // Both label classes must be present or the fixture teaches nothing.
    CHECK(kept > 100);
    CHECK(dropped > 100);
  }

  const std::vector<TrainPair> pairs = fixture.pairs();
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].sim == &fixture.sim[0]);
  CHECK(pairs[1].real_occupancy == &fixture.real_occupancy[1]);

  // Same seed, same fixture.
  const RaydropFixture replay = synth_raydrop_fixture(2, 31, 55.0);
  CHECK(replay.sim[1] == fixture.sim[1]);
  CHECK(replay.real_occupancy[0] == fixture.real_occupancy[0]);
}

TEST_SUITE_END();
