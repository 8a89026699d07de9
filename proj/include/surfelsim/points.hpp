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
#include <vector>

#include "surfelsim/geometry.hpp"

namespace surfelsim {

struct PointSample {
  Vec3 position;
  double intensity = 0.0;  // calibrated, [0, 1]
  std::int32_t laser_id = 0;
  double timestamp = 0.0;
  SemanticClass semantic_class = SemanticClass::kBackground;
  Vec3 sensor_origin;  // where the return was recorded from, same frame as
                       // position
  bool dynamic = false;
};

// One spin of the sensor. Point positions are kept in the sensor frame at
// sweep start, exactly as recorded; sensor_to_map lifts them into the map
// frame when sweeps are aggregated.
struct Sweep {
  std::vector<PointSample> points;
  Pose sensor_to_map;
  double sweep_start = 0.0;
};

}  // namespace surfelsim
