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
#include <string>
#include <vector>

#include "surfelsim/map_builder.hpp"
#include "surfelsim/object_bank.hpp"
#include "surfelsim/points.hpp"
#include "surfelsim/polar_grid.hpp"
#include "surfelsim/raydrop.hpp"
#include "surfelsim/scene.hpp"

// Seeded synthetic inputs with known ground truth, shared by the test
// suites, the benchmark, and the `synth` command.

namespace surfelsim {

// Static sensor looking at a ground plane and one wall, optionally with a
// moving blob of dynamic-flagged points.
struct PlaneSceneSpec {
  int sweeps = 3;
  int ground_points = 4000;  // per sweep
  int wall_points = 2000;    // per sweep
  int dynamic_points = 0;    // per sweep, flagged dynamic
  double noise = 0.003;      // jitter along the surface normal
  std::uint64_t seed = 1;
};

inline constexpr Vec3 kPlaneSceneSensor{0.0, 0.0, 1.8};
inline constexpr double kPlaneSceneWallX = 10.0;

std::vector<Sweep> synth_plane_sweeps(const PlaneSceneSpec& spec);

// A box-shaped vehicle observed from a static sensor over several sweeps,
// with per-sweep box labels. Only sensor-facing faces receive points; the
// labels can be perturbed to give alignment some work to do.
struct BoxObjectSpec {
  Vec3 dims{4.2, 1.8, 1.5};
  Vec3 start_center{8.0, 1.0, 0.75};
  double start_heading = 0.3;
  Vec3 velocity{0.0, 0.0, 0.0};
  int sweeps = 6;
  int points_per_sweep = 900;
  double surface_noise = 0.004;
  double label_position_noise = 0.0;
  double label_heading_noise = 0.0;
  std::uint64_t seed = 2;
};

struct BoxObjectDataset {
  std::vector<Sweep> sweeps;
  std::vector<BoxLabel> labels;
  Vec3 dims;
};

BoxObjectDataset synth_box_object(const BoxObjectSpec& spec);

// Box-surface surfel asset in the object frame, all six faces, outward
// normals.
ObjectAsset synth_box_asset(const std::string& source_id, const Vec3& dims,
                            double spacing, std::uint64_t seed);

// Street-shaped map: ground strip, intermittent building walls, poles. The
// surfel count lands close to the target.
SurfelMap synth_street_map(std::size_t target_surfels, std::uint64_t seed);

// Scenario driving down the street map at constant speed, with actor
// placements named "car0", "car1", ...
Scenario synth_street_scenario(const std::string& map_path, int actors,
                               std::uint64_t seed);

// Unstructured random scene: surfel soup around the sensor plus box actors
// on their own trajectories, viewed from a moving sensor.
struct RandomSceneSpec {
  std::uint64_t seed = 0;
  std::size_t surfels = 500;
  int actors = 0;
  int actor_surfel_target = 120;
  std::int32_t spin_direction = 1;
};

struct RandomScene {
  SurfelMap map;
  std::vector<ObjectAsset> bank;
  Scenario scenario;
};

RandomScene synth_random_scene(const RandomSceneSpec& spec);

// Paired training data where the drop rule is known exactly: a cell keeps
// its return iff its incidence stays at or below drop_incidence_deg.
struct RaydropFixture {
  std::vector<Grid> sim;
  std::vector<Grid> real_occupancy;

  std::vector<TrainPair> pairs() const {
    std::vector<TrainPair> out;
    for (std::size_t i = 0; i < sim.size(); ++i)
      out.push_back({&sim[i], &real_occupancy[i]});
    return out;
  }
};

RaydropFixture synth_raydrop_fixture(int n_pairs, std::uint64_t seed,
                                     double drop_incidence_deg = 60.0);

}  // namespace surfelsim
