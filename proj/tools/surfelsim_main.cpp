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

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "surfelsim/errors.hpp"
#include "surfelsim/io.hpp"
#include "surfelsim/map_builder.hpp"
#include "surfelsim/metrics.hpp"
#include "surfelsim/object_bank.hpp"
#include "surfelsim/polar_grid.hpp"
#include "surfelsim/raycast.hpp"
#include "surfelsim/raydrop.hpp"
#include "surfelsim/scene.hpp"
#include "surfelsim/synth.hpp"

namespace fs = std::filesystem;
using namespace surfelsim;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string intrinsics_path;

  SensorIntrinsics intrinsics(double sweep_period = 0.1) const {
    SensorIntrinsics intr = intrinsics_path.empty()
                                ? SensorIntrinsics::default64()
                                : read_intrinsics_csv(intrinsics_path);
    intr.sweep_period = sweep_period;
    return intr;
  }
};

// ---------------------------------------------------------------------------

void cmd_build_map(const GlobalOptions&, const std::vector<std::string>& paths,
                   const std::string& out, double voxel_size,
                   double disk_radius) {
  std::vector<Sweep> sweeps;
  for (const std::string& path : paths) sweeps.push_back(read_sweep(path));

  const std::vector<PointSample> cloud = aggregate_sweeps(sweeps);
  SurfelBuildOptions options;
  options.voxel_size = voxel_size;
  options.disk_radius = disk_radius;
  SurfelBuildStats stats;
  const SurfelMap map = build_surfels(cloud, options, &stats);
  write_surfels(out, map.surfels);

  std::printf("aggregated %zu static points from %zu sweeps\n",
              stats.input_points, sweeps.size());
  std::printf("wrote %zu surfels to %s (%zu degenerate dropped)\n",
              map.surfels.size(), out.c_str(), stats.degenerate_dropped);
}

// ---------------------------------------------------------------------------

void cmd_build_object(const GlobalOptions&,
                      const std::vector<std::string>& sweep_paths,
                      const std::string& labels_path, const std::string& bank,
                      const std::string& id, double voxel_size) {
  const std::vector<BoxLabel> labels = read_labels(labels_path);
  if (labels.empty()) throw InputError("label file has no boxes");

  std::vector<Sweep> sweeps;
  for (const std::string& path : sweep_paths)
    sweeps.push_back(read_sweep(path));

  // Each sweep is folded into the object frame on its own, mirrored, then
  // aligned against everything accumulated so far.
  std::vector<PointSample> accumulated;
  std::size_t skipped = 0;
  for (const Sweep& sweep : sweeps) {
    std::vector<PointSample> observation;
    try {
      observation = accumulate_object({&sweep, 1}, labels);
    } catch (const QualityError&) {
      ++skipped;  // this sweep never saw the box
      continue;
    }
    std::vector<PointSample> mirrored = mirror_symmetry(observation);
    if (accumulated.empty()) {
      accumulated = std::move(mirrored);
      continue;
    }
    const IcpResult icp = icp_refine(mirrored, accumulated);
    for (PointSample& p : mirrored) {
      p.position = icp.transform.apply(p.position);
      p.sensor_origin = icp.transform.apply(p.sensor_origin);
      accumulated.push_back(p);
    }
  }
  if (accumulated.empty())
    throw QualityError("no sweep saw the labelled object");
  if (skipped > 0)
    std::printf("skipped %zu sweeps without box returns\n", skipped);

  MeshifyOptions options;
  options.voxel_size = voxel_size;
  ObjectAsset asset = meshify_object(accumulated, labels.front().dims, id,
                                     options);

  // Heading of the object as seen from the first observation.
  const BoxLabel& first = labels.front();
  const Vec3 view = first.center - sweeps.front().sensor_to_map.translation;
  asset.rel_orientation =
      wrap_angle(first.heading - std::atan2(view.y, view.x));

  write_bank_asset(bank, asset);
  std::printf("wrote asset '%s' (%zu surfels) to %s\n",
              asset.source_id.c_str(), asset.surfels.size(), bank.c_str());
}

// ---------------------------------------------------------------------------

void cmd_simulate(const GlobalOptions& global, const std::string& scenario_path,
                  const std::string& bank_dir, const std::string& model_path,
                  double drop_rate, const std::string& out_prefix) {
  const Scenario scenario = read_scenario(scenario_path);

  SurfelMap map;
  map.surfels = read_surfels(scenario.map_path);
  map.rebuild_index();

  std::vector<ObjectAsset> bank;
  if (!scenario.actors.empty()) {
    if (bank_dir.empty())
      throw InputError("scenario places actors but no --bank was given");
    bank = read_bank(bank_dir);
  }

  const Scene scene = compose(scenario, map, bank);
  for (const std::string& warning : scene.warnings)
    std::fprintf(stderr, "warning: %s\n", warning.c_str());

  const SensorIntrinsics intr = global.intrinsics(scenario.sweep_period);
  const HitImage hits = cast_sweep(scene, intr, scenario.sweep_start);
  const Grid features = project(hits);

  const std::uint64_t seed = global.seed.value_or(scenario.seed);
  Grid probabilities;
  if (!model_path.empty()) {
    const RaydropModel model = read_model(model_path);
    probabilities = predict(model, features);
  } else {
    // Keep probability (1 - drop_rate) on every occupied cell.
    probabilities = Grid::zeros(1, features.rows, features.cols);
    const float keep = static_cast<float>(1.0 - drop_rate);
    for (std::size_t i = 0; i < probabilities.data.size(); ++i)
      probabilities.data[i] =
          features.data[channel::kOccupancy * probabilities.data.size() + i] !=
                  0.0f
              ? keep
              : 0.0f;
  }
  const Grid mask = sample_mask(probabilities, seed);

  const std::vector<PointSample> cloud_map_frame =
      to_pointcloud(features, mask, hits.rays);

  // The output sweep stores sensor-frame records under the sweep-start pose.
  Sweep sweep;
  sweep.sweep_start = scenario.sweep_start;
  sweep.sensor_to_map = pose_at(scenario.sdv_trajectory, scenario.sweep_start);
  const Pose map_to_sensor = sweep.sensor_to_map.inverse();
  sweep.points.reserve(cloud_map_frame.size());
  for (PointSample p : cloud_map_frame) {
    p.position = map_to_sensor.apply(p.position);
    p.sensor_origin = {0.0, 0.0, 0.0};
    sweep.points.push_back(p);
  }

  write_grid(out_prefix + ".grid.lgrd", features);
  write_grid(out_prefix + ".mask.lgrd", mask);
  write_sweep(out_prefix + ".cloud.lswp", sweep);

  std::size_t hit_count = 0, masked = 0;
  for (const HitCell& cell : hits.cells) {
    hit_count += cell.hit;
    masked += cell.sdv_masked;
  }
  std::printf("cast %zu rays: %zu returns, %zu self-returns masked, "
              "%zu kept after raydrop\n",
              hits.cells.size(), hit_count, masked, sweep.points.size());
  std::printf("wrote %s.grid.lgrd, %s.mask.lgrd, %s.cloud.lswp\n",
              out_prefix.c_str(), out_prefix.c_str(), out_prefix.c_str());
}

// ---------------------------------------------------------------------------

void cmd_train_raydrop(const GlobalOptions& global, const std::string& pairs_path,
                       const std::string& config_path, const std::string& out,
                       const std::string& loss_log_path) {
  const std::vector<TrainPairPaths> pair_paths = read_train_pairs(pairs_path);

  std::vector<Grid> sims, reals;
  for (const TrainPairPaths& paths : pair_paths) {
    sims.push_back(read_grid(paths.sim));
    const Grid& sim = sims.back();
    if (fs::path(paths.real).extension() == ".lswp") {
      const Sweep sweep = read_sweep(paths.real);
      SensorIntrinsics intr = global.intrinsics();
      intr.n_cols = sim.cols;
      if (intr.n_beams != sim.rows)
        throw InputError("real sweep beam count does not match the sim grid");
      reals.push_back(bin_real_sweep(sweep.points, intr).occupancy);
    } else {
      reals.push_back(read_grid(paths.real));
    }
  }
  std::vector<TrainPair> pairs;
  for (std::size_t i = 0; i < sims.size(); ++i)
    pairs.push_back({&sims[i], &reals[i]});

  TrainConfig config;
  if (!config_path.empty()) config = read_train_config(config_path);
  if (global.seed) config.seed = *global.seed;

  std::vector<double> losses;
  const RaydropModel model = train(pairs, config, &losses);
  write_model(out, model);

  if (!loss_log_path.empty()) {
    std::ofstream log(loss_log_path);
    if (!log) throw FormatError("cannot open loss log for write");
    log << "epoch,loss\n";
    for (std::size_t e = 0; e < losses.size(); ++e)
      log << e << ',' << losses[e] << '\n';
  }
  std::printf("trained on %zu pairs, final loss %.6f, wrote %s\n",
              pairs.size(), model.final_loss, out.c_str());
}

// ---------------------------------------------------------------------------

void cmd_eval(const GlobalOptions& global, const std::string& sim_cloud_path,
              const std::string& real_path, const std::string& sim_occ_path,
              const std::string& agreement_path, const std::string& out) {
  const Sweep sim_cloud = read_sweep(sim_cloud_path);
  const Sweep real = read_sweep(real_path);

  SensorIntrinsics intr = global.intrinsics();
  Grid sim_occ;
  if (!sim_occ_path.empty()) {
    sim_occ = read_grid(sim_occ_path);
    intr.n_cols = sim_occ.cols;
    if (sim_occ.rows != intr.n_beams)
      throw InputError("sim occupancy rows do not match the beam count");
  } else {
    sim_occ = bin_real_sweep(sim_cloud.points, intr).occupancy;
  }
  const Grid real_occ = bin_real_sweep(real.points, intr).occupancy;

  const double ratio = point_count_ratio(
      static_cast<std::int64_t>(sim_cloud.points.size()),
      static_cast<std::int64_t>(real.points.size()));
  const OccupancyAgreement occupancy = occupancy_agreement(sim_occ, real_occ);

  nlohmann::json report;
  report["sim_points"] = sim_cloud.points.size();
  report["real_points"] = real.points.size();
  report["point_count_ratio"] = ratio;
  report["occupancy"] = {{"precision", occupancy.precision},
                         {"recall", occupancy.recall},
                         {"iou", occupancy.iou}};
  if (!agreement_path.empty()) {
    const AgreementSets sets = read_agreement_sets(agreement_path);
    report["detection_agreement"] = detection_agreement(sets);
  }

  std::ofstream file(out);
  if (!file) throw FormatError("cannot open report for write");
  file << report.dump(2) << '\n';
  std::printf("%s\n", report.dump(2).c_str());
}

// ---------------------------------------------------------------------------

void cmd_synth(const GlobalOptions& global, const std::string& what,
               const std::string& out_dir, int count, int actors,
               std::size_t surfels) {
  const std::uint64_t seed = global.seed.value_or(1);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  if (what == "plane-sweeps") {
    PlaneSceneSpec spec;
    spec.sweeps = count;
    spec.seed = seed;
    spec.dynamic_points = 400;
    const std::vector<Sweep> sweeps = synth_plane_sweeps(spec);
    for (std::size_t i = 0; i < sweeps.size(); ++i)
      write_sweep((dir / fmt::format("sweep_{:03}.lswp", i)).string(),
                  sweeps[i]);
    std::printf("wrote %zu sweeps to %s\n", sweeps.size(), out_dir.c_str());
    return;
  }
  if (what == "box-object") {
    BoxObjectSpec spec;
    spec.sweeps = count;
    spec.seed = seed;
    spec.label_position_noise = 0.02;
    spec.label_heading_noise = 0.01;
    const BoxObjectDataset data = synth_box_object(spec);
    for (std::size_t i = 0; i < data.sweeps.size(); ++i)
      write_sweep((dir / fmt::format("sweep_{:03}.lswp", i)).string(),
                  data.sweeps[i]);
    write_labels((dir / "labels.json").string(), data.labels);
    std::printf("wrote %zu sweeps and labels.json to %s\n",
                data.sweeps.size(), out_dir.c_str());
    return;
  }
  if (what == "street-scene") {
    const SurfelMap map = synth_street_map(surfels, seed);
    write_surfels((dir / "map.lsrf").string(), map.surfels);
    for (int i = 0; i < actors; ++i) {
      const Vec3 dims{4.4, 1.8, 1.5};
      write_bank_asset((dir / "bank").string(),
                       synth_box_asset(fmt::format("car{}", i), dims, 0.08,
                                       seed + 100 + i));
    }
    Scenario scenario = synth_street_scenario("map.lsrf", actors, seed);
    write_scenario((dir / "scenario.json").string(), scenario);
    std::printf("wrote map.lsrf (%zu surfels), scenario.json and %d assets "
                "to %s\n",
                map.surfels.size(), actors, out_dir.c_str());
    return;
  }
  if (what == "raydrop-pairs") {
    const RaydropFixture fixture = synth_raydrop_fixture(count, seed);
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < fixture.sim.size(); ++i) {
      const std::string sim_name = fmt::format("sim_{:03}.lgrd", i);
      const std::string real_name = fmt::format("real_{:03}.lgrd", i);
      write_grid((dir / sim_name).string(), fixture.sim[i]);
      write_grid((dir / real_name).string(), fixture.real_occupancy[i]);
      pairs.push_back({{"sim", sim_name}, {"real", real_name}});
    }
    std::ofstream file(dir / "pairs.json");
    file << pairs.dump(2) << '\n';
    std::printf("wrote %zu grid pairs to %s\n", fixture.sim.size(),
                out_dir.c_str());
    return;
  }
  throw InputError("unknown synth kind '" + what + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surfel-based spinning-lidar simulation"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "override the sampling seed");
  app.add_option("--threads", global.threads,
                 "worker threads (0 keeps the runtime default)");
  app.add_option("--intrinsics", global.intrinsics_path,
                 "beam elevation table (csv)");

  // build-map
  auto* build_map = app.add_subcommand(
      "build-map", "fuse sweeps into a static surfel map");
  std::vector<std::string> bm_sweeps;
  std::string bm_out;
  double bm_voxel = 0.04, bm_disk = 0.0;
  build_map->add_option("sweeps", bm_sweeps, "input .lswp files")
      ->required()
      ->expected(-1);
  build_map->add_option("--out", bm_out, "output .lsrf map")->required();
  build_map->add_option("--voxel-size", bm_voxel, "voxel edge length (m)");
  build_map->add_option("--disk-radius", bm_disk,
                        "surfel radius (m, 0 = half voxel diagonal)");

  // build-object
  auto* build_object = app.add_subcommand(
      "build-object", "reconstruct one object into the bank");
  std::vector<std::string> bo_sweeps;
  std::string bo_labels, bo_bank, bo_id;
  double bo_voxel = 0.04;
  build_object->add_option("--sweeps", bo_sweeps, "input .lswp files")
      ->required()
      ->expected(-1);
  build_object->add_option("--labels", bo_labels, "box labels (json)")
      ->required();
  build_object->add_option("--bank", bo_bank, "bank directory")->required();
  build_object->add_option("--id", bo_id, "asset source id")->required();
  build_object->add_option("--voxel-size", bo_voxel, "voxel edge length (m)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "cast one sweep");
  std::string sim_scenario, sim_bank, sim_model, sim_out;
  double sim_drop = 0.0;
  simulate->add_option("--scenario", sim_scenario, "scenario json")
      ->required();
  simulate->add_option("--bank", sim_bank, "object bank directory");
  simulate->add_option("--model", sim_model, "raydrop model file");
  simulate->add_option("--drop-rate", sim_drop,
                       "uniform drop probability when no model is given")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--out", sim_out, "output path prefix")->required();

  // train-raydrop
  auto* train_cmd = app.add_subcommand("train-raydrop",
                                       "fit the keep/drop classifier");
  std::string tr_pairs, tr_config, tr_out, tr_log;
  train_cmd->add_option("--pairs", tr_pairs, "pair list json")->required();
  train_cmd->add_option("--config", tr_config, "training config json");
  train_cmd->add_option("--out", tr_out, "output model file")->required();
  train_cmd->add_option("--loss-log", tr_log, "per-epoch loss csv");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "compare sim against real");
  std::string ev_sim, ev_real, ev_occ, ev_sets, ev_out;
  eval_cmd->add_option("--sim-cloud", ev_sim, "simulated sweep (.lswp)")
      ->required();
  eval_cmd->add_option("--real", ev_real, "recorded sweep (.lswp)")
      ->required();
  eval_cmd->add_option("--sim-occupancy", ev_occ,
                       "occupancy grid overriding the sim binning");
  eval_cmd->add_option("--agreement", ev_sets, "detection sets json");
  eval_cmd->add_option("--out", ev_out, "report json")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic inputs");
  std::string sy_what, sy_out;
  int sy_count = 3, sy_actors = 2;
  std::size_t sy_surfels = 500000;
  synth_cmd
      ->add_option("kind", sy_what,
                   "plane-sweeps | box-object | street-scene | raydrop-pairs")
      ->required();
  synth_cmd->add_option("--out", sy_out, "output directory")->required();
  synth_cmd->add_option("--count", sy_count, "sweeps or pairs to generate");
  synth_cmd->add_option("--actors", sy_actors, "actors in the street scene");
  synth_cmd->add_option("--surfels", sy_surfels, "street map surfel target");

  try {
    app.parse(argc, argv);
    if (*seed_opt) global.seed = seed_value;
    if (global.threads > 0) omp_set_num_threads(global.threads);

    if (*build_map)
      cmd_build_map(global, bm_sweeps, bm_out, bm_voxel, bm_disk);
    else if (*build_object)
      cmd_build_object(global, bo_sweeps, bo_labels, bo_bank, bo_id,
                       bo_voxel);
    else if (*simulate)
      cmd_simulate(global, sim_scenario, sim_bank, sim_model, sim_drop,
                   sim_out);
    else if (*train_cmd)
      cmd_train_raydrop(global, tr_pairs, tr_config, tr_out, tr_log);
    else if (*eval_cmd)
      cmd_eval(global, ev_sim, ev_real, ev_occ, ev_sets, ev_out);
    else if (*synth_cmd)
      cmd_synth(global, sy_what, sy_out, sy_count, sy_actors, sy_surfels);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const QualityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const ResolutionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
