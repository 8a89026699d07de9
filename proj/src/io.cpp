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

#include "surfelsim/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>

#include "surfelsim/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace surfelsim {

namespace {

// ---------------------------------------------------------------------------
// Little-endian byte packing

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void magic(const char m[4]) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(m[i]));
  }
  void text(const std::string& s) {
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(fmt::format("cannot open '{}' for write", path));
    out.write(reinterpret_cast<const char*>(buf_.data()),
              static_cast<std::streamsize>(buf_.size()));
    if (!out) throw FormatError(fmt::format("write to '{}' failed", path));
  }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  static ByteReader load(const std::string& path) {
    if (!fs::exists(path))
      throw ResolutionError(fmt::format("no such file: '{}'", path));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(fmt::format("cannot open '{}'", path));
    ByteReader r;
    r.path_ = path;
    r.data_.assign(std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>());
    return r;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i)
      v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(data_[pos_++]))
           << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_++]))
           << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_++]))
           << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::string text(std::size_t n) {
    need(n);
    std::string s(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }

  void expect_magic(const char m[4]) {
    need(4);
    for (int i = 0; i < 4; ++i) {
      if (data_[pos_ + i] != m[i])
        throw FormatError(
            fmt::format("'{}' is not a {} file", path_, std::string(m, 4)));
    }
    pos_ += 4;
  }

  void expect_size(std::size_t bytes, const char* what) {
    if (remaining() != bytes)
      throw FormatError(
          fmt::format("'{}': {} payload has the wrong size", path_, what));
  }

  void expect_done() {
    if (pos_ != data_.size())
      throw FormatError(fmt::format("'{}' has trailing bytes", path_));
  }

  const std::string& path() const { return path_; }

 private:
  void need(std::size_t n) {
    if (data_.size() - pos_ < n)
      throw FormatError(fmt::format("'{}' is truncated", path_));
  }

  std::string path_;
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

SemanticClass semantic_from_u8(std::uint8_t v, const std::string& path) {
  switch (v) {
    case 1: return SemanticClass::kBackground;
    case 2: return SemanticClass::kRoad;
    case 3: return SemanticClass::kVehicle;
    default:
      throw FormatError(
          fmt::format("'{}': unknown semantic class {}", path, v));
  }
}

void write_pose(ByteWriter& w, const Pose& pose) {
  for (int i = 0; i < 9; ++i) w.f64(pose.rotation.m[i]);
  w.f64(pose.translation.x);
  w.f64(pose.translation.y);
  w.f64(pose.translation.z);
}

Pose read_pose(ByteReader& r) {
  Pose pose;
  for (int i = 0; i < 9; ++i) pose.rotation.m[i] = r.f64();
  pose.translation = {r.f64(), r.f64(), r.f64()};
  return pose;
}

// ---------------------------------------------------------------------------
// JSON helpers

json parse_json_file(const std::string& path) {
  if (!fs::exists(path))
    throw ResolutionError(fmt::format("no such file: '{}'", path));
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }
}

void save_json_file(const std::string& path, const json& j, int indent = 2) {
  std::ofstream out(path);
  if (!out) throw FormatError(fmt::format("cannot open '{}' for write", path));
  out << j.dump(indent) << '\n';
  if (!out) throw FormatError(fmt::format("write to '{}' failed", path));
}

Vec3 vec3_from(const json& j, const std::string& path, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw FormatError(
        fmt::format("'{}': {} must be an [x, y, z] array", path, what));
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Trajectory trajectory_from(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw FormatError(
        fmt::format("'{}': trajectory must be a non-empty array", path));
  Trajectory trajectory;
  for (const json& s : j) {
    TrajectorySample sample;
    sample.t = s.at("t").get<double>();
    sample.pose.translation = vec3_from(s.at("xyz"), path, "xyz");
    const Vec3 rpy = vec3_from(s.at("rpy"), path, "rpy");
    sample.pose.rotation = rotation_rpy(rpy.x, rpy.y, rpy.z);
    trajectory.samples.push_back(sample);
  }
  return trajectory;
}

// ZYX Euler split of a rotation matrix; the inverse of rotation_rpy away
// from the pitch singularity.
Vec3 rpy_of(const Mat3& r) {
  const double sp = -r.m[6];
  const double pitch = std::asin(std::clamp(sp, -1.0, 1.0));
  if (std::abs(sp) > 1.0 - 1e-9) {
    // Gimbal lock: fold everything into roll.
    return {std::atan2(-r.m[5], r.m[4]), pitch, 0.0};
  }
  return {std::atan2(r.m[7], r.m[8]), pitch, std::atan2(r.m[3], r.m[0])};
}

json trajectory_to(const Trajectory& trajectory) {
  json arr = json::array();
  for (const TrajectorySample& sample : trajectory.samples) {
    const Vec3 rpy = rpy_of(sample.pose.rotation);
    arr.push_back({{"t", sample.t},
                   {"xyz", {sample.pose.translation.x,
                            sample.pose.translation.y,
                            sample.pose.translation.z}},
                   {"rpy", {rpy.x, rpy.y, rpy.z}}});
  }
  return arr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sweeps

void write_sweep(const std::string& path, const Sweep& sweep) {
  ByteWriter w;
  w.magic("LSWP");
  w.u16(1);
  w.u64(sweep.points.size());
  write_pose(w, sweep.sensor_to_map);
  w.f64(sweep.sweep_start);
  for (const PointSample& p : sweep.points) {
    if (p.laser_id < 0 || p.laser_id > 255)
      throw InputError("laser id does not fit the sweep record");
    w.f32(static_cast<float>(p.position.x));
    w.f32(static_cast<float>(p.position.y));
    w.f32(static_cast<float>(p.position.z));
    w.f32(static_cast<float>(p.intensity));
    w.u8(static_cast<std::uint8_t>(p.laser_id));
    w.u8(static_cast<std::uint8_t>(p.semantic_class));
    w.u8(p.dynamic ? 1 : 0);
    w.f64(p.timestamp);
  }
  w.save(path);
}

Sweep read_sweep(const std::string& path) {
  ByteReader r = ByteReader::load(path);
  r.expect_magic("LSWP");
  if (r.u16() != 1)
    throw FormatError(fmt::format("'{}': unsupported sweep version", path));
  const std::uint64_t count = r.u64();

  Sweep sweep;
  sweep.sensor_to_map = read_pose(r);
  sweep.sweep_start = r.f64();
  r.expect_size(count * 27, "point");
  sweep.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PointSample p;
    p.position = {r.f32(), r.f32(), r.f32()};
    p.intensity = r.f32();
    p.laser_id = r.u8();
    p.semantic_class = semantic_from_u8(r.u8(), path);
    p.dynamic = r.u8() != 0;
    p.timestamp = r.f64();
    p.sensor_origin = {0.0, 0.0, 0.0};  // sensor frame
    sweep.points.push_back(p);
  }
  r.expect_done();
  return sweep;
}

// ---------------------------------------------------------------------------
// Surfel sets

void write_surfels(const std::string& path, std::span<const Surfel> surfels) {
  ByteWriter w;
  w.magic("LSRF");
  w.u16(1);
  w.u64(surfels.size());
  for (const Surfel& s : surfels) {
    w.f32(static_cast<float>(s.center.x));
    w.f32(static_cast<float>(s.center.y));
    w.f32(static_cast<float>(s.center.z));
    w.f32(static_cast<float>(s.normal.x));
    w.f32(static_cast<float>(s.normal.y));
    w.f32(static_cast<float>(s.normal.z));
    w.f32(static_cast<float>(s.radius));
    w.f32(static_cast<float>(s.orig_intensity));
    w.f32(static_cast<float>(s.orig_range));
    w.f32(static_cast<float>(s.orig_incidence));
    w.u8(static_cast<std::uint8_t>(s.semantic_class));
  }
  w.save(path);
}

std::vector<Surfel> read_surfels(const std::string& path) {
  ByteReader r = ByteReader::load(path);
  r.expect_magic("LSRF");
  if (r.u16() != 1)
    throw FormatError(fmt::format("'{}': unsupported surfel version", path));
  const std::uint64_t count = r.u64();
  r.expect_size(count * 41, "surfel");

  std::vector<Surfel> surfels;
  surfels.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Surfel s;
    s.center = {r.f32(), r.f32(), r.f32()};
    s.normal = {r.f32(), r.f32(), r.f32()};
    s.radius = r.f32();
    s.orig_intensity = r.f32();
    s.orig_range = r.f32();
    s.orig_incidence = r.f32();
    s.semantic_class = semantic_from_u8(r.u8(), path);
    surfels.push_back(s);
  }
  r.expect_done();
  return surfels;
}

// ---------------------------------------------------------------------------
// Grids

void write_grid(const std::string& path, const Grid& grid) {
  ByteWriter w;
  w.magic("LGRD");
  w.u16(1);
  w.u16(static_cast<std::uint16_t>(grid.channels));
  w.u16(static_cast<std::uint16_t>(grid.rows));
  w.u16(static_cast<std::uint16_t>(grid.cols));
  for (const float v : grid.data) w.f32(v);
  w.save(path);
}

Grid read_grid(const std::string& path) {
  ByteReader r = ByteReader::load(path);
  r.expect_magic("LGRD");
  if (r.u16() != 1)
    throw FormatError(fmt::format("'{}': unsupported grid version", path));
  Grid grid;
  grid.channels = r.u16();
  grid.rows = r.u16();
  grid.cols = r.u16();
  const std::size_t n = static_cast<std::size_t>(grid.channels) * grid.rows *
                        grid.cols;
  r.expect_size(n * 4, "grid");
  grid.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) grid.data[i] = r.f32();
  r.expect_done();
  return grid;
}

// ---------------------------------------------------------------------------
// Raydrop models

namespace {

std::string kind_to_string(RaydropKind kind) {
  switch (kind) {
    case RaydropKind::kConstant: return "constant";
    case RaydropKind::kLogistic: return "logistic";
    case RaydropKind::kWindowedLogistic: return "windowed-logistic";
    case RaydropKind::kPlugin: return "plugin";
  }
  throw InputError("unknown raydrop kind");
}

RaydropKind kind_from_string(const std::string& s, const std::string& path) {
  if (s == "constant") return RaydropKind::kConstant;
  if (s == "logistic") return RaydropKind::kLogistic;
  if (s == "windowed-logistic") return RaydropKind::kWindowedLogistic;
  if (s == "plugin") return RaydropKind::kPlugin;
  throw FormatError(fmt::format("'{}': unknown model kind '{}'", path, s));
}

}  // namespace

void write_model(const std::string& path, const RaydropModel& model) {
  json header;
  header["format"] = "raydrop-model";
  header["version"] = 1;
  header["kind"] = kind_to_string(model.kind);
  header["window"] = model.feature_spec.window;
  header["channels"] = model.feature_spec.channels;
  header["mean"] = model.normalization.mean;
  header["stddev"] = model.normalization.stddev;
  header["param_count"] = model.parameters.size();
  header["plugin"] = model.plugin_path;
  header["final_loss"] = model.final_loss;

  ByteWriter w;
  const std::string head = header.dump();
  w.u32(static_cast<std::uint32_t>(head.size()));
  w.text(head);
  for (const double p : model.parameters)
    w.f32(static_cast<float>(p));
  w.save(path);
}

RaydropModel read_model(const std::string& path) {
  ByteReader r = ByteReader::load(path);
  const std::uint32_t head_len = r.u32();
  if (head_len > r.remaining())
    throw FormatError(fmt::format("'{}' is truncated", path));
  json header;
  try {
    header = json::parse(r.text(head_len));
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }

  RaydropModel model;
  try {
    if (header.at("format").get<std::string>() != "raydrop-model" ||
        header.at("version").get<int>() != 1)
      throw FormatError(fmt::format("'{}' is not a raydrop model", path));
    model.kind = kind_from_string(header.at("kind").get<std::string>(), path);
    model.feature_spec.window = header.at("window").get<std::int32_t>();
    model.feature_spec.channels =
        header.at("channels").get<std::vector<std::int32_t>>();
    model.normalization.mean =
        header.at("mean").get<std::vector<double>>();
    model.normalization.stddev =
        header.at("stddev").get<std::vector<double>>();
    model.plugin_path = header.at("plugin").get<std::string>();
    model.final_loss = header.at("final_loss").get<double>();
    const std::size_t param_count =
        header.at("param_count").get<std::size_t>();
    r.expect_size(param_count * 4, "parameter");
    model.parameters.reserve(param_count);
    for (std::size_t i = 0; i < param_count; ++i)
      model.parameters.push_back(r.f32());
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }
  r.expect_done();

  const bool logistic = model.kind == RaydropKind::kLogistic ||
                        model.kind == RaydropKind::kWindowedLogistic;
  const std::size_t expected =
      model.kind == RaydropKind::kConstant
          ? 1
          : (logistic ? model.feature_spec.dim() + 1 : 0);
  if (model.parameters.size() != expected)
    throw FormatError(
        fmt::format("'{}': parameter count does not match the model", path));
  if (logistic && (model.normalization.mean.size() !=
                       model.feature_spec.channels.size() ||
                   model.normalization.stddev.size() !=
                       model.feature_spec.channels.size()))
    throw FormatError(
        fmt::format("'{}': normalization does not match the channels", path));
  return model;
}

// ---------------------------------------------------------------------------
// Scenario

Scenario read_scenario(const std::string& path) {
  const json j = parse_json_file(path);
  Scenario scenario;
  try {
    scenario.map_path = j.at("map").get<std::string>();
    scenario.sweep_start = j.value("sweep_start", 0.0);
    scenario.sweep_period = j.value("sweep_period", 0.1);
    scenario.seed = j.value("seed", std::uint64_t{0});

    const json& sdv = j.at("sdv");
    scenario.sdv_trajectory = trajectory_from(sdv.at("trajectory"), path);
    if (sdv.contains("exclusion_box"))
      scenario.sdv_exclusion_box =
          vec3_from(sdv.at("exclusion_box"), path, "exclusion_box");

    if (j.contains("actors")) {
      for (const json& actor : j.at("actors")) {
        ActorPlacement placement;
        placement.asset_id = actor.at("asset").get<std::string>();
        placement.trajectory = trajectory_from(actor.at("trajectory"), path);
        scenario.actors.push_back(placement);
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }

  // Relative map paths are anchored at the scenario file.
  const fs::path map_path(scenario.map_path);
  if (map_path.is_relative())
    scenario.map_path = (fs::path(path).parent_path() / map_path).string();
  return scenario;
}

void write_scenario(const std::string& path, const Scenario& scenario) {
  json j;
  j["map"] = scenario.map_path;
  j["sweep_start"] = scenario.sweep_start;
  j["sweep_period"] = scenario.sweep_period;
  j["seed"] = scenario.seed;
  j["sdv"] = {{"trajectory", trajectory_to(scenario.sdv_trajectory)},
              {"exclusion_box",
               {scenario.sdv_exclusion_box.x, scenario.sdv_exclusion_box.y,
                scenario.sdv_exclusion_box.z}}};
  json actors = json::array();
  for (const ActorPlacement& placement : scenario.actors)
    actors.push_back({{"asset", placement.asset_id},
                      {"trajectory", trajectory_to(placement.trajectory)}});
  j["actors"] = actors;
  save_json_file(path, j);
}

// ---------------------------------------------------------------------------
// Beam table

SensorIntrinsics read_intrinsics_csv(const std::string& path) {
  if (!fs::exists(path))
    throw ResolutionError(fmt::format("no such file: '{}'", path));
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open '{}'", path));

  std::string line;
  if (!std::getline(in, line) ||
      line.find("beam_id") == std::string::npos ||
      line.find("elevation_deg") == std::string::npos)
    throw FormatError(
        fmt::format("'{}': missing beam_id,elevation_deg header", path));

  std::vector<std::pair<int, double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw FormatError(fmt::format("'{}': bad row '{}'", path, line));
    try {
      rows.emplace_back(std::stoi(line.substr(0, comma)),
                        std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw FormatError(fmt::format("'{}': bad row '{}'", path, line));
    }
  }
  if (rows.empty()) throw FormatError(fmt::format("'{}': no beams", path));

  SensorIntrinsics intr = SensorIntrinsics::default64();
  intr.n_beams = static_cast<std::int32_t>(rows.size());
  intr.elevations.assign(rows.size(),
                         std::numeric_limits<double>::quiet_NaN());
  for (const auto& [beam, deg] : rows) {
    if (beam < 0 || beam >= intr.n_beams ||
        !std::isnan(intr.elevations[beam]))
      throw FormatError(fmt::format(
          "'{}': beam ids must cover 0..{} exactly once", path,
          intr.n_beams - 1));
    intr.elevations[beam] = deg * kPi / 180.0;
  }
  intr.validate();
  return intr;
}

void write_intrinsics_csv(const std::string& path,
                          const SensorIntrinsics& intrinsics) {
  std::ofstream out(path);
  if (!out) throw FormatError(fmt::format("cannot open '{}' for write", path));
  out << "beam_id,elevation_deg\n";
  for (std::int32_t i = 0; i < intrinsics.n_beams; ++i)
    out << i << ',' << fmt::format("{}", intrinsics.elevations[i] * 180.0 / kPi)
        << '\n';
  if (!out) throw FormatError(fmt::format("write to '{}' failed", path));
}

// ---------------------------------------------------------------------------
// Labels

std::vector<BoxLabel> read_labels(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_array())
    throw FormatError(fmt::format("'{}': labels must be an array", path));
  std::vector<BoxLabel> labels;
  try {
    for (const json& l : j) {
      BoxLabel label;
      label.center = vec3_from(l.at("center"), path, "center");
      label.heading = l.at("heading").get<double>();
      label.dims = vec3_from(l.at("dims"), path, "dims");
      label.timestamp = l.at("timestamp").get<double>();
      labels.push_back(label);
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }
  return labels;
}

void write_labels(const std::string& path, std::span<const BoxLabel> labels) {
  json arr = json::array();
  for (const BoxLabel& label : labels)
    arr.push_back(
        {{"center", {label.center.x, label.center.y, label.center.z}},
         {"heading", label.heading},
         {"dims", {label.dims.x, label.dims.y, label.dims.z}},
         {"timestamp", label.timestamp}});
  save_json_file(path, arr);
}

// ---------------------------------------------------------------------------
// Object bank

std::vector<ObjectAsset> read_bank(const std::string& dir) {
  if (!fs::exists(dir))
    throw ResolutionError(fmt::format("no such bank directory: '{}'", dir));
  const fs::path index_path = fs::path(dir) / "index.json";
  if (!fs::exists(index_path)) return {};  // a fresh bank is empty

  const json index = parse_json_file(index_path.string());
  std::vector<ObjectAsset> bank;
  try {
    for (const json& entry : index.at("assets")) {
      ObjectAsset asset;
      asset.source_id = entry.at("source_id").get<std::string>();
      asset.dims = vec3_from(entry.at("dims"), index_path.string(), "dims");
      asset.rel_orientation = entry.at("rel_orientation").get<double>();
      const std::size_t count = entry.at("surfel_count").get<std::size_t>();
      const std::string file = entry.at("file").get<std::string>();
      asset.surfels = read_surfels((fs::path(dir) / file).string());
      if (asset.surfels.size() != count)
        throw FormatError(fmt::format(
            "bank index and '{}' disagree on the surfel count", file));
      bank.push_back(std::move(asset));
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", index_path.string(), e.what()));
  }
  return bank;
}

void write_bank_asset(const std::string& dir, const ObjectAsset& asset) {
  if (asset.source_id.empty()) throw InputError("asset needs a source id");
  fs::create_directories(dir);

  const std::string file = asset.source_id + ".lsrf";
  write_surfels((fs::path(dir) / file).string(), asset.surfels);

  const fs::path index_path = fs::path(dir) / "index.json";
  json index;
  if (fs::exists(index_path))
    index = parse_json_file(index_path.string());
  else
    index = json{{"assets", json::array()}};

  json entry = {{"source_id", asset.source_id},
                {"dims", {asset.dims.x, asset.dims.y, asset.dims.z}},
                {"rel_orientation", asset.rel_orientation},
                {"surfel_count", asset.surfels.size()},
                {"file", file}};
  try {
    json& assets = index.at("assets");
    bool replaced = false;
    for (json& existing : assets) {
      if (existing.at("source_id").get<std::string>() == asset.source_id) {
        existing = entry;
        replaced = true;
        break;
      }
    }
    if (!replaced) assets.push_back(entry);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", index_path.string(), e.what()));
  }

  // The index swap is atomic so a concurrent reader never sees half a file.
  const fs::path tmp = index_path.string() + ".tmp";
  save_json_file(tmp.string(), index);
  fs::rename(tmp, index_path);
}

// ---------------------------------------------------------------------------
// Misc JSON inputs

AgreementSets read_agreement_sets(const std::string& path) {
  const json j = parse_json_file(path);
  AgreementSets sets;
  try {
    const auto load = [&](const char* key) {
      std::set<std::string> out;
      for (const json& v : j.at(key)) out.insert(v.get<std::string>());
      return out;
    };
    sets.real_plus = load("real_plus");
    sets.real_minus = load("real_minus");
    sets.sim_plus = load("sim_plus");
    sets.sim_minus = load("sim_minus");
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }
  return sets;
}

std::vector<TrainPairPaths> read_train_pairs(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_array() || j.empty())
    throw FormatError(
        fmt::format("'{}': expected a non-empty array of pairs", path));
  std::vector<TrainPairPaths> pairs;
  const fs::path base = fs::path(path).parent_path();
  try {
    for (const json& p : j) {
      TrainPairPaths tp;
      tp.sim = p.at("sim").get<std::string>();
      tp.real = p.at("real").get<std::string>();
      if (fs::path(tp.sim).is_relative()) tp.sim = (base / tp.sim).string();
      if (fs::path(tp.real).is_relative()) tp.real = (base / tp.real).string();
      pairs.push_back(tp);
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }
  return pairs;
}

TrainConfig read_train_config(const std::string& path) {
  const json j = parse_json_file(path);
  TrainConfig config;
  try {
    if (j.contains("kind"))
      config.kind = kind_from_string(j.at("kind").get<std::string>(), path);
    config.window = j.value("window", config.window);
    if (j.contains("channels"))
      config.channels = j.at("channels").get<std::vector<std::int32_t>>();
    config.step_size = j.value("step_size", config.step_size);
    config.epochs = j.value("epochs", config.epochs);
    config.batch_cells = j.value("batch_cells", config.batch_cells);
    config.seed = j.value("seed", config.seed);
    config.beta1 = j.value("beta1", config.beta1);
    config.beta2 = j.value("beta2", config.beta2);
    config.adam_eps = j.value("adam_eps", config.adam_eps);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': {}", path, e.what()));
  }
  return config;
}

}  // namespace surfelsim
