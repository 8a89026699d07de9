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
#include "surfelsim/map_builder.hpp"
#include "surfelsim/object_bank.hpp"

namespace surfelsim {

struct TrajectorySample {
  double t = 0.0;
  Pose pose;
};

// Timed poses with strictly increasing timestamps.
struct Trajectory {
  std::vector<TrajectorySample> samples;
};

// Pose at time t: linear translation, spherical rotation interpolation
// between the surrounding samples, clamped to the first/last sample outside
// the covered range. Throws InputError on an empty trajectory.
Pose pose_at(const Trajectory& trajectory, double t);

// Translational velocity of the segment containing t, using half-open
// segments [t_i, t_{i+1}). Zero outside [t_first, t_last), matching the
// clamped pose.
Vec3 velocity_at(const Trajectory& trajectory, double t);

struct ActorPlacement {
  std::string asset_id;
  Trajectory trajectory;
};

// One simulation request, as loaded from a scenario file.
struct Scenario {
  std::string map_path;
  Trajectory sdv_trajectory;
  Vec3 sdv_exclusion_box{5.0, 2.5, 2.2};  // length, width, height
  std::vector<ActorPlacement> actors;
  double sweep_start = 0.0;
  double sweep_period = 0.1;
  std::uint64_t seed = 0;
};

struct SceneActor {
  const ObjectAsset* asset = nullptr;  // owned by the bank
  Trajectory trajectory;
};

// A composed, immutable view over the map and the placed actors. The map
// and the bank outlive the scene; composition copies nothing heavy.
struct Scene {
  const SurfelMap* map = nullptr;
  Trajectory sdv_trajectory;
  Vec3 sdv_exclusion_box{5.0, 2.5, 2.2};
  std::vector<SceneActor> actors;
  std::vector<std::string> warnings;
};

// Resolves actor asset ids against the bank and validates trajectories.
// Unknown ids raise ResolutionError; trajectories that wander outside the
// map bounds only add a warning. Neither the map nor the bank is modified.
Scene compose(const Scenario& scenario, const SurfelMap& map,
              std::span<const ObjectAsset> bank);

}  // namespace surfelsim
