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

#include <span>
#include <string>
#include <vector>

#include "surfelsim/metrics.hpp"
#include "surfelsim/object_bank.hpp"
#include "surfelsim/points.hpp"
#include "surfelsim/polar_grid.hpp"
#include "surfelsim/raycast.hpp"
#include "surfelsim/raydrop.hpp"
#include "surfelsim/scene.hpp"

// File formats. All binary formats are little-endian regardless of host,
// write/read round-trips are byte-identical, and every reader throws
// ResolutionError when the file does not exist and FormatError when its
// content is malformed.
//
//   sweep  "LSWP": magic, u16 version, u64 count, sensor pose (9 + 3 f64),
//          f64 sweep start, then per point f32 x/y/z/intensity, u8 laser,
//          u8 class, u8 dynamic, f64 timestamp.
//   map    "LSRF": magic, u16 version, u64 count, then per surfel ten f32
//          (centre, normal, radius, intensity, range, incidence), u8 class.
//   grid   "LGRD": magic, u16 version, u16 channels, u16 rows, u16 cols,
//          then f32 data channel-major, row-major.
//   model  u32 JSON-header length, the JSON header, then an f32 parameter
//          block whose length the header states.

namespace surfelsim {

void write_sweep(const std::string& path, const Sweep& sweep);
Sweep read_sweep(const std::string& path);

void write_surfels(const std::string& path, std::span<const Surfel> surfels);
std::vector<Surfel> read_surfels(const std::string& path);

void write_grid(const std::string& path, const Grid& grid);
Grid read_grid(const std::string& path);

void write_model(const std::string& path, const RaydropModel& model);
RaydropModel read_model(const std::string& path);

// Scenario JSON. Reading resolves a relative map path against the
// scenario file's own directory.
Scenario read_scenario(const std::string& path);
void write_scenario(const std::string& path, const Scenario& scenario);

// Beam table CSV with a "beam_id,elevation_deg" header; all other
// intrinsics keep their defaults.
SensorIntrinsics read_intrinsics_csv(const std::string& path);
void write_intrinsics_csv(const std::string& path,
                          const SensorIntrinsics& intrinsics);

// Box label JSON array.
std::vector<BoxLabel> read_labels(const std::string& path);
void write_labels(const std::string& path, std::span<const BoxLabel> labels);

// Object bank: a directory of one .lsrf per asset plus an index.json that
// records id, dims, relative orientation and surfel count.
std::vector<ObjectAsset> read_bank(const std::string& dir);
// Adds or replaces one asset; the index update is atomic (tmp + rename).
void write_bank_asset(const std::string& dir, const ObjectAsset& asset);

AgreementSets read_agreement_sets(const std::string& path);

struct TrainPairPaths {
  std::string sim;
  std::string real;
};
std::vector<TrainPairPaths> read_train_pairs(const std::string& path);
TrainConfig read_train_config(const std::string& path);

}  // namespace surfelsim
