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
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "support/tmpdir.hpp"
#include "surfelsim/errors.hpp"
#include "surfelsim/io.hpp"

using namespace surfelsim;
using testing::TempDir;
using testing::read_bytes;
using testing::write_bytes;

namespace {

Sweep make_sweep() {
  Sweep sweep;
  sweep.sensor_to_map.rotation = rotation_rpy(0.1, -0.2, 0.3);
  sweep.sensor_to_map.translation = {4.0, -2.0, 1.5};
  sweep.sweep_start = 12.625;
  PointSample a;
  a.position = {1.5, -2.25, 0.125};
  a.intensity = 0.5;
  a.laser_id = 7;
  a.timestamp = 12.6875;
  a.semantic_class = SemanticClass::kRoad;
  a.dynamic = false;
  PointSample b = a;
  b.position = {-3.0, 0.5, 2.0};
  b.laser_id = 255;
  b.semantic_class = SemanticClass::kVehicle;
  b.dynamic = true;
  sweep.points = {a, b};
  return sweep;
}

std::vector<Surfel> make_surfels() {
  Surfel s;
  s.center = {1.0, 2.5, -0.5};
  s.normal = {0.0, 0.0, 1.0};
  s.radius = 0.25;
  s.orig_intensity = 0.75;
  s.orig_range = 12.5;
  s.orig_incidence = 0.5;
  s.semantic_class = SemanticClass::kBackground;
  Surfel t = s;
  t.center = {-4.0, 0.0, 3.0};
  t.semantic_class = SemanticClass::kVehicle;
  return {s, t};
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("sweep round-trip is byte-identical") {
  TempDir dir;
  const std::string path = dir.file("a.lswp");
  const Sweep sweep = make_sweep();
  write_sweep(path, sweep);
  const std::vector<char> first = read_bytes(path);

  const Sweep loaded = read_sweep(path);
  REQUIRE(loaded.points.size() == 2);
  CHECK(loaded.sensor_to_map.rotation == sweep.sensor_to_map.rotation);
  CHECK(loaded.sensor_to_map.translation == sweep.sensor_to_map.translation);
  CHECK(loaded.sweep_start == sweep.sweep_start);
  CHECK(loaded.points[0].position == sweep.points[0].position);
  CHECK(loaded.points[0].intensity == 0.5);
  CHECK(loaded.points[0].laser_id == 7);
  CHECK(loaded.points[0].timestamp == 12.6875);
  CHECK(loaded.points[0].semantic_class == SemanticClass::kRoad);
  CHECK(loaded.points[1].dynamic);
  CHECK(loaded.points[1].laser_id == 255);

  const std::string again = dir.file("b.lswp");
  write_sweep(again, loaded);
  CHECK(read_bytes(again) == first);
}

TEST_CASE("sweep write rejects laser ids outside one byte") {
  TempDir dir;
  Sweep sweep = make_sweep();
  sweep.points[0].laser_id = 256;
  CHECK_THROWS_AS(write_sweep(dir.file("bad.lswp"), sweep), InputError);
  sweep.points[0].laser_id = -1;
  CHECK_THROWS_AS(write_sweep(dir.file("bad.lswp"), sweep), InputError);
}

TEST_CASE("sweep reader rejects damage") {
  TempDir dir;
  const std::string path = dir.file("a.lswp");
  write_sweep(path, make_sweep());
  const std::vector<char> good = read_bytes(path);

  CHECK_THROWS_AS(read_sweep(dir.file("missing.lswp")), ResolutionError);

  std::vector<char> bad = good;
  bad[0] = 'X';
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_sweep(path), FormatError);

  bad = good;
  bad[4] = 2;  // unsupported version
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_sweep(path), FormatError);

  bad = good;
  bad.pop_back();
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_sweep(path), FormatError);

  bad = good;
  bad.push_back(0);
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_sweep(path), FormatError);
}

TEST_CASE("surfel round-trip is byte-identical") {
  TempDir dir;
  const std::string path = dir.file("m.lsrf");
  write_surfels(path, make_surfels());
  const std::vector<char> first = read_bytes(path);

  const std::vector<Surfel> loaded = read_surfels(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].center == Vec3{1.0, 2.5, -0.5});
  CHECK(loaded[0].radius == 0.25);
  CHECK(loaded[0].orig_range == 12.5);
  CHECK(loaded[0].semantic_class == SemanticClass::kBackground);
  CHECK(loaded[1].semantic_class == SemanticClass::kVehicle);

  const std::string again = dir.file("n.lsrf");
  write_surfels(again, loaded);
  CHECK(read_bytes(again) == first);
}

TEST_CASE("surfel reader rejects damage") {
  TempDir dir;
  const std::string path = dir.file("m.lsrf");
  write_surfels(path, make_surfels());
  const std::vector<char> good = read_bytes(path);

  CHECK_THROWS_AS(read_surfels(dir.file("missing.lsrf")), ResolutionError);

  std::vector<char> bad = good;
  // First record: header is 14 bytes, ten f32 fields, then the class byte.
  bad[14 + 40] = 7;
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_surfels(path), FormatError);

  bad = good;
  bad[1] = 'x';
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_surfels(path), FormatError);

  bad = good;
  bad.resize(20);
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_surfels(path), FormatError);
}

TEST_CASE("grid round-trip is byte-identical including special floats") {
  TempDir dir;
  Grid grid = Grid::zeros(3, 4, 5);
  for (std::size_t i = 0; i < grid.data.size(); ++i)
    grid.data[i] = 0.25f * static_cast<float>(i) - 3.0f;
  grid.at(0, 0, 0) = -0.0f;
  grid.at(1, 2, 3) = std::numeric_limits<float>::infinity();
  grid.at(2, 3, 4) = std::numeric_limits<float>::quiet_NaN();

  const std::string path = dir.file("g.lgrd");
  write_grid(path, grid);
  const std::vector<char> first = read_bytes(path);

  const Grid loaded = read_grid(path);
  CHECK(loaded.channels == 3);
  CHECK(loaded.rows == 4);
  CHECK(loaded.cols == 5);
  CHECK(std::signbit(loaded.at(0, 0, 0)));
  CHECK(std::isinf(loaded.at(1, 2, 3)));
  CHECK(std::isnan(loaded.at(2, 3, 4)));

  const std::string again = dir.file("h.lgrd");
  write_grid(again, loaded);
  CHECK(read_bytes(again) == first);

  std::vector<char> bad = first;
  bad.pop_back();
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_grid(path), FormatError);
  CHECK_THROWS_AS(read_grid(dir.file("missing.lgrd")), ResolutionError);
}

TEST_CASE("model round-trip covers every kind") {
  TempDir dir;

  RaydropModel constant;
  constant.kind = RaydropKind::kConstant;
  constant.parameters = {0.375};
  constant.final_loss = 0.6875;

  RaydropModel logistic;
  logistic.kind = RaydropKind::kLogistic;
  logistic.feature_spec.window = 0;
  logistic.feature_spec.channels = {0, 2};
  logistic.normalization.mean = {10.0, 0.5};
  logistic.normalization.stddev = {4.0, 0.25};
  logistic.parameters = {0.5, -1.25, 2.0};
  logistic.final_loss = 0.25;

  RaydropModel windowed;
  windowed.kind = RaydropKind::kWindowedLogistic;
  windowed.feature_spec.window = 1;
  windowed.feature_spec.channels = {0, 1, 2};
  windowed.normalization.mean = {1.0, 2.0, 3.0};
  windowed.normalization.stddev = {1.0, 1.0, 2.0};
  windowed.parameters.assign(windowed.feature_spec.dim() + 1, 0.125);
  windowed.final_loss = 0.5;

  RaydropModel plugin;
  plugin.kind = RaydropKind::kPlugin;
  plugin.plugin_path = "probs.lgrd";

  int idx = 0;
  for (const RaydropModel* model :
       {&constant, &logistic, &windowed, &plugin}) {
    const std::string path = dir.file("m" + std::to_string(idx) + ".bin");
    const std::string re = dir.file("r" + std::to_string(idx) + ".bin");
    ++idx;
    write_model(path, *model);
    const RaydropModel loaded = read_model(path);
    CHECK(loaded.kind == model->kind);
    CHECK(loaded.feature_spec.window == model->feature_spec.window);
    CHECK(loaded.feature_spec.channels == model->feature_spec.channels);
    CHECK(loaded.normalization.mean == model->normalization.mean);
    CHECK(loaded.normalization.stddev == model->normalization.stddev);
    CHECK(loaded.plugin_path == model->plugin_path);
    CHECK(loaded.final_loss == model->final_loss);
    REQUIRE(loaded.parameters.size() == model->parameters.size());
    for (std::size_t i = 0; i < loaded.parameters.size(); ++i)
      CHECK(loaded.parameters[i] ==
            static_cast<double>(static_cast<float>(model->parameters[i])));
    write_model(re, loaded);
    CHECK(read_bytes(re) == read_bytes(path));
  }
}

TEST_CASE("model reader rejects damage") {
  TempDir dir;
  const std::string path = dir.file("m.bin");
  RaydropModel constant;
  constant.kind = RaydropKind::kConstant;
  constant.parameters = {0.5};
  write_model(path, constant);
  const std::vector<char> good = read_bytes(path);

  CHECK_THROWS_AS(read_model(dir.file("missing.bin")), ResolutionError);

  // Header length pointing past the end of the file.
  std::vector<char> bad = good;
  bad[0] = -1;
  bad[1] = -1;
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_model(path), FormatError);

  // Garbage JSON header.
  bad = good;
  bad[4] = '!';
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_model(path), FormatError);

  // Parameter block shorter than param_count promises.
  bad = good;
  bad.pop_back();
  write_bytes(path, bad);
  CHECK_THROWS_AS(read_model(path), FormatError);
}

TEST_CASE("scenario json round-trips and anchors relative map paths") {
  TempDir dir;
  Scenario scenario;
  scenario.map_path = "maps/street.lsrf";
  scenario.sweep_start = 1.5;
  scenario.sweep_period = 0.05;
  scenario.seed = 42;
  scenario.sdv_exclusion_box = {6.0, 3.0, 2.5};
  scenario.sdv_trajectory.samples = {
      {0.0, {rotation_rpy(0.1, -0.2, 0.3), {1.0, 2.0, 3.0}}},
      {1.0, {rotation_rpy(0.0, 0.0, 1.0), {11.0, 2.0, 3.0}}}};
  ActorPlacement actor;
  actor.asset_id = "car0";
  actor.trajectory.samples = {{0.0, {Mat3::identity(), {5.0, -3.0, 0.0}}}};
  scenario.actors = {actor};

  const std::string path = dir.file("scene.json");
  write_scenario(path, scenario);
  const Scenario loaded = read_scenario(path);

  CHECK(loaded.map_path == dir.file("maps/street.lsrf"));
  CHECK(loaded.sweep_start == 1.5);
  CHECK(loaded.sweep_period == 0.05);
  CHECK(loaded.seed == 42);
  CHECK(loaded.sdv_exclusion_box == Vec3{6.0, 3.0, 2.5});
  REQUIRE(loaded.sdv_trajectory.samples.size() == 2);
  CHECK(loaded.sdv_trajectory.samples[0].t == 0.0);
  CHECK(loaded.sdv_trajectory.samples[0].pose.translation ==
        Vec3{1.0, 2.0, 3.0});
  for (int i = 0; i < 9; ++i) {
    CHECK(loaded.sdv_trajectory.samples[0].pose.rotation.m[i] ==
          doctest::Approx(scenario.sdv_trajectory.samples[0].pose.rotation.m[i])
              .epsilon(1e-12));
  }
  REQUIRE(loaded.actors.size() == 1);
  CHECK(loaded.actors[0].asset_id == "car0");
  CHECK(loaded.actors[0].trajectory.samples[0].pose.translation ==
        Vec3{5.0, -3.0, 0.0});

  // An absolute map path is left alone.
  scenario.map_path = dir.file("street.lsrf");
  write_scenario(path, scenario);
  CHECK(read_scenario(path).map_path == dir.file("street.lsrf"));

  CHECK_THROWS_AS(read_scenario(dir.file("missing.json")), ResolutionError);
  write_bytes(path, {'n', 'o', 'p', 'e'});
  CHECK_THROWS_AS(read_scenario(path), FormatError);
}

TEST_CASE("scenario survives a straight-down pitch") {
  TempDir dir;
  Scenario scenario;
  scenario.map_path = "m.lsrf";
  scenario.sdv_trajectory.samples = {
      {0.0, {rotation_rpy(0.3, kPi / 2.0, 0.2), {0.0, 0.0, 0.0}}}};
  const std::string path = dir.file("gimbal.json");
  write_scenario(path, scenario);
  const Scenario loaded = read_scenario(path);
  for (int i = 0; i < 9; ++i) {
    CHECK(loaded.sdv_trajectory.samples[0].pose.rotation.m[i] ==
          doctest::Approx(scenario.sdv_trajectory.samples[0].pose.rotation.m[i])
              .epsilon(1e-9));
  }
}

TEST_CASE("intrinsics csv round-trip") {
  TempDir dir;
  const std::string path = dir.file("beams.csv");
  const SensorIntrinsics intr = SensorIntrinsics::default64();
  write_intrinsics_csv(path, intr);
  const SensorIntrinsics loaded = read_intrinsics_csv(path);
  CHECK(loaded.n_beams == 64);
  REQUIRE(loaded.elevations.size() == 64);
  for (std::size_t i = 0; i < loaded.elevations.size(); ++i)
    CHECK(loaded.elevations[i] ==
          doctest::Approx(intr.elevations[i]).epsilon(1e-12));
  // Everything but the beam table keeps its defaults.
  CHECK(loaded.n_cols == intr.n_cols);
  CHECK(loaded.sweep_period == intr.sweep_period);
}

TEST_CASE("intrinsics csv accepts crlf and shuffled beam ids") {
  TempDir dir;
  const std::string path = dir.file("beams.csv");
  std::ofstream(path) << "beam_id,elevation_deg\r\n1,-5.0\r\n0,10.0\r\n";
  const SensorIntrinsics loaded = read_intrinsics_csv(path);
  REQUIRE(loaded.n_beams == 2);
  CHECK(loaded.elevations[0] == doctest::Approx(10.0 * kPi / 180.0));
  CHECK(loaded.elevations[1] == doctest::Approx(-5.0 * kPi / 180.0));
}

TEST_CASE("intrinsics csv rejects damage") {
  TempDir dir;
  const std::string path = dir.file("beams.csv");
  CHECK_THROWS_AS(read_intrinsics_csv(path), ResolutionError);

  std::ofstream(path) << "id,elev\n0,1.0\n";
  CHECK_THROWS_AS(read_intrinsics_csv(path), FormatError);

  std::ofstream(path) << "beam_id,elevation_deg\n";
  CHECK_THROWS_AS(read_intrinsics_csv(path), FormatError);

  std::ofstream(path) << "beam_id,elevation_deg\n0,2.0\n0,1.0\n";
  CHECK_THROWS_AS(read_intrinsics_csv(path), FormatError);

  std::ofstream(path) << "beam_id,elevation_deg\n0,2.0\n5,1.0\n";
  CHECK_THROWS_AS(read_intrinsics_csv(path), FormatError);

  std::ofstream(path) << "beam_id,elevation_deg\nzero,say what\n";
  CHECK_THROWS_AS(read_intrinsics_csv(path), FormatError);

  // Parses fine but the elevations are not descending.
  std::ofstream(path) << "beam_id,elevation_deg\n0,-5.0\n1,10.0\n";
  CHECK_THROWS_AS(read_intrinsics_csv(path), InputError);
}

TEST_CASE("labels round-trip") {
  TempDir dir;
  const std::string path = dir.file("labels.json");
  std::vector<BoxLabel> labels(2);
  labels[0] = {{8.0, 1.0, 0.75}, 0.3, {4.2, 1.8, 1.5}, 0.0};
  labels[1] = {{8.5, 1.0, 0.75}, 0.35, {4.2, 1.8, 1.5}, 0.1};
  write_labels(path, labels);
  const std::vector<BoxLabel> loaded = read_labels(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].center == labels[0].center);
  CHECK(loaded[0].heading == labels[0].heading);
  CHECK(loaded[0].dims == labels[0].dims);
  CHECK(loaded[1].timestamp == labels[1].timestamp);

  CHECK_THROWS_AS(read_labels(dir.file("missing.json")), ResolutionError);
  std::ofstream(path) << "{}";
  CHECK_THROWS_AS(read_labels(path), FormatError);
  std::ofstream(path) << "[{\"center\": [0,0,0]}]";
  CHECK_THROWS_AS(read_labels(path), FormatError);
}

TEST_CASE("object bank stores and replaces assets") {
  TempDir dir;
  const std::string bank_dir = dir.file("bank");

  CHECK_THROWS_AS(read_bank(dir.file("nowhere")), ResolutionError);

  ObjectAsset car;
  car.source_id = "car0";
  car.surfels = make_surfels();
  car.dims = {4.2, 1.8, 1.5};
  car.rel_orientation = 0.25;
  write_bank_asset(bank_dir, car);

  ObjectAsset van = car;
  van.source_id = "van1";
  van.dims = {5.0, 2.0, 2.2};
  van.surfels.push_back(van.surfels.front());
  write_bank_asset(bank_dir, van);

  std::vector<ObjectAsset> bank = read_bank(bank_dir);
  REQUIRE(bank.size() == 2);
  CHECK(bank[0].source_id == "car0");
  CHECK(bank[0].surfels.size() == 2);
  CHECK(bank[0].dims == Vec3{4.2, 1.8, 1.5});
  CHECK(bank[0].rel_orientation == 0.25);
  CHECK(bank[1].source_id == "van1");
  CHECK(bank[1].surfels.size() == 3);

  // Re-adding an id replaces the asset instead of duplicating it.
  car.surfels.push_back(car.surfels.front());
  car.rel_orientation = -0.5;
  write_bank_asset(bank_dir, car);
  bank = read_bank(bank_dir);
  REQUIRE(bank.size() == 2);
  CHECK(bank[0].surfels.size() == 3);
  CHECK(bank[0].rel_orientation == -0.5);

  // A directory without an index is an empty bank.
  std::filesystem::create_directories(dir.file("fresh"));
  CHECK(read_bank(dir.file("fresh")).empty());

  // A surfel file that disagrees with the index is rejected.
  write_surfels(dir.file("bank/car0.lsrf"), {});
  CHECK_THROWS_AS(read_bank(bank_dir), FormatError);

  ObjectAsset anonymous;
  CHECK_THROWS_AS(write_bank_asset(bank_dir, anonymous), InputError);
}

TEST_CASE("agreement sets json") {
  TempDir dir;
  const std::string path = dir.file("sets.json");
  std::ofstream(path) << R"({
    "real_plus": ["a", "b"],
    "real_minus": ["c"],
    "sim_plus": ["a"],
    "sim_minus": ["c"]
  })";
  const AgreementSets sets = read_agreement_sets(path);
  CHECK(sets.real_plus == std::set<std::string>{"a", "b"});
  CHECK(sets.sim_minus == std::set<std::string>{"c"});

  std::ofstream(path) << R"({"real_plus": []})";
  CHECK_THROWS_AS(read_agreement_sets(path), FormatError);
}

TEST_CASE("train pair list resolves relative paths") {
  TempDir dir;
  const std::string path = dir.file("pairs.json");
  std::ofstream(path) << R"([
    {"sim": "sim_000.lgrd", "real": "/abs/real_000.lgrd"}
  ])";
  const std::vector<TrainPairPaths> pairs = read_train_pairs(path);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].sim == dir.file("sim_000.lgrd"));
  CHECK(pairs[0].real == "/abs/real_000.lgrd");

  std::ofstream(path) << "[]";
  CHECK_THROWS_AS(read_train_pairs(path), FormatError);
  std::ofstream(path) << "{}";
  CHECK_THROWS_AS(read_train_pairs(path), FormatError);
}

TEST_CASE("train config file overrides defaults field by field") {
  TempDir dir;
  const std::string path = dir.file("config.json");
  std::ofstream(path) << "{}";
  const TrainConfig defaults = read_train_config(path);
  CHECK(defaults.kind == RaydropKind::kWindowedLogistic);
  CHECK(defaults.window == 2);
  CHECK(defaults.channels.empty());
  CHECK(defaults.step_size == 1e-4);
  CHECK(defaults.epochs == 100);
  CHECK(defaults.batch_cells == 8192);
  CHECK(defaults.seed == 0);

  std::ofstream(path) << R"({
    "kind": "logistic",
    "window": 1,
    "channels": [0, 7],
    "step_size": 0.5,
    "epochs": 3,
    "batch_cells": 128,
    "seed": 9,
    "beta1": 0.5,
    "beta2": 0.75,
    "adam_eps": 0.001
  })";
  const TrainConfig config = read_train_config(path);
  CHECK(config.kind == RaydropKind::kLogistic);
  CHECK(config.window == 1);
  CHECK(config.channels == std::vector<std::int32_t>{0, 7});
  CHECK(config.step_size == 0.5);
  CHECK(config.epochs == 3);
  CHECK(config.batch_cells == 128);
  CHECK(config.seed == 9);
  CHECK(config.beta1 == 0.5);
  CHECK(config.beta2 == 0.75);
  CHECK(config.adam_eps == 0.001);

  std::ofstream(path) << R"({"kind": "transformer"})";
  CHECK_THROWS_AS(read_train_config(path), FormatError);
}

TEST_SUITE_END();
