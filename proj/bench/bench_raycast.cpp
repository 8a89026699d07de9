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

// Sweep-casting benchmark: the parallel engine against its own
// single-threaded run and against the exhaustive serial reference, on
// seeded street scenes. Usage:
//
//   bench_raycast [small_surfels] [large_surfels]
//
// The reference caster is O(rays x surfels), so it only runs on the small
// scene. Output equality is checked cell for cell on every row.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "support/reference_cast.hpp"
#include "surfelsim/raycast.hpp"
#include "surfelsim/scene.hpp"
#include "surfelsim/synth.hpp"

namespace {

using namespace surfelsim;

struct BenchScene {
  std::string name;
  SurfelMap map;
  std::vector<ObjectAsset> bank;
  Scenario scenario;
};

BenchScene make_scene(const std::string& name, std::size_t surfels,
                      std::uint64_t seed) {
  BenchScene s;
  s.name = name;
  s.map = synth_street_map(surfels, seed);
  s.bank.push_back(synth_box_asset("car0", {4.4, 1.8, 1.5}, 0.08, seed + 1));
  s.bank.push_back(synth_box_asset("car1", {4.6, 1.9, 1.6}, 0.08, seed + 2));
  s.scenario = synth_street_scenario("", 2, seed + 3);
  return s;
}

void print_row(const std::string& scene, const char* caster, int threads,
               double seconds, std::size_t rays, const char* match) {
  std::printf("%-14s %-18s %7d %9.2f s %10.0f rays/s   %s\n", scene.c_str(),
              caster, threads, seconds, static_cast<double>(rays) / seconds,
              match);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t small_surfels =
      argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
  const std::size_t large_surfels =
      argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 500000;
  const SensorIntrinsics intrinsics = SensorIntrinsics::default64();
  const std::size_t rays = static_cast<std::size_t>(intrinsics.n_beams) *
                           intrinsics.n_cols;
  const unsigned hardware = std::thread::hardware_concurrency();

  std::printf("sweep casting, %zu rays per sweep, %u hardware threads\n\n",
              rays, hardware);
  std::printf("%-14s %-18s %7s %11s %16s   %s\n", "scene", "caster",
              "threads", "time", "throughput", "output");

  int exit_code = 0;

  {
    const BenchScene s = make_scene(
        "street-" + std::to_string(small_surfels / 1000) + "k", small_surfels,
        7);
    const Scene scene = compose(s.scenario, s.map, s.bank);

    double t0 = omp_get_wtime();
    const HitImage reference =
        testing::brute_cast_sweep(scene, intrinsics, s.scenario.sweep_start);
    print_row(s.name, "reference-serial", 1, omp_get_wtime() - t0, rays,
              "baseline");

    for (const int threads : {1, 2, 4, 8}) {
      omp_set_num_threads(threads);
      t0 = omp_get_wtime();
      const HitImage fast =
          cast_sweep(scene, intrinsics, s.scenario.sweep_start);
      const double dt = omp_get_wtime() - t0;
      const bool same = testing::hit_images_equal(fast, reference, 0.0);
      if (!same) exit_code = 1;
      print_row(s.name, "bvh", threads, dt, rays,
                same ? "identical to reference" : "DIFFERS from reference");
    }
  }

  {
    const BenchScene s = make_scene(
        "street-" + std::to_string(large_surfels / 1000) + "k", large_surfels,
        11);
    const Scene scene = compose(s.scenario, s.map, s.bank);

    omp_set_num_threads(1);
    double t0 = omp_get_wtime();
    const HitImage single =
        cast_sweep(scene, intrinsics, s.scenario.sweep_start);
    print_row(s.name, "bvh", 1, omp_get_wtime() - t0, rays, "baseline");

    for (const int threads : {2, 4, 8}) {
      omp_set_num_threads(threads);
      t0 = omp_get_wtime();
      const HitImage multi =
          cast_sweep(scene, intrinsics, s.scenario.sweep_start);
      const double dt = omp_get_wtime() - t0;
      const bool same = testing::hit_images_equal(multi, single, 0.0);
      if (!same) exit_code = 1;
      print_row(s.name, "bvh", threads, dt, rays,
                same ? "identical to 1-thread" : "DIFFERS from 1-thread");
    }
  }

  return exit_code;
}
