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

#include "surfelsim/metrics.hpp"

#include <algorithm>

#include "surfelsim/errors.hpp"
#include "surfelsim/raydrop.hpp"

namespace surfelsim {

namespace {

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const std::string& s : a)
    if (b.count(s)) return false;
  return true;
}

std::size_t intersection_size(const std::set<std::string>& a,
                              const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const std::string& s : a) n += b.count(s);
  return n;
}

}  // namespace

double detection_agreement(const AgreementSets& sets) {
  if (!disjoint(sets.real_plus, sets.real_minus))
    throw InputError("real positive and negative sets overlap");
  if (!disjoint(sets.sim_plus, sets.sim_minus))
    throw InputError("sim positive and negative sets overlap");

  const std::size_t universe = sets.real_plus.size() + sets.real_minus.size();
  if (universe == 0) return 1.0;
  const std::size_t agree = intersection_size(sets.real_plus, sets.sim_plus) +
                            intersection_size(sets.real_minus, sets.sim_minus);
  return static_cast<double>(agree) / static_cast<double>(universe);
}

double point_count_ratio(std::int64_t sim_points, std::int64_t real_points) {
  if (sim_points < 0 || real_points < 0)
    throw InputError("point counts must be non-negative");
  if (real_points == 0) throw InputError("real sweep has no points");
  return static_cast<double>(sim_points) / static_cast<double>(real_points);
}

OccupancyAgreement occupancy_agreement(const Grid& sim_occupancy,
                                       const Grid& real_occupancy) {
  if (sim_occupancy.channels != 1 || real_occupancy.channels != 1 ||
      sim_occupancy.rows != real_occupancy.rows ||
      sim_occupancy.cols != real_occupancy.cols)
    throw InputError("occupancy grids must be single-channel and same shape");

  std::int64_t both = 0, sim_only = 0, real_only = 0;
  for (std::size_t i = 0; i < sim_occupancy.data.size(); ++i) {
    const bool s = sim_occupancy.data[i] != 0.0f;
    const bool r = real_occupancy.data[i] != 0.0f;
    both += s && r;
    sim_only += s && !r;
    real_only += !s && r;
  }

  OccupancyAgreement out;
  out.precision = (both + sim_only) == 0
                      ? 1.0
                      : static_cast<double>(both) /
                            static_cast<double>(both + sim_only);
  out.recall = (both + real_only) == 0
                   ? 1.0
                   : static_cast<double>(both) /
                         static_cast<double>(both + real_only);
  out.iou = (both + sim_only + real_only) == 0
                ? 1.0
                : static_cast<double>(both) /
                      static_cast<double>(both + sim_only + real_only);
  return out;
}

Grid random_raydrop(const Grid& occupancy, double drop_rate,
                    std::uint64_t seed) {
  if (occupancy.channels != 1)
    throw InputError("occupancy grid must have one channel");
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0))
    throw InputError("drop rate must lie in [0, 1]");

  Grid keep = occupancy;
  const float keep_prob = static_cast<float>(1.0 - drop_rate);
  for (float& v : keep.data) v = v != 0.0f ? keep_prob : 0.0f;
  return sample_mask(keep, seed);
}

}  // namespace surfelsim
