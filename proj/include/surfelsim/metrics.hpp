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
#include <set>
#include <string>

#include "surfelsim/polar_grid.hpp"

namespace surfelsim {

// Detections of one frame, split into positives and negatives, for the real
// and the simulated run of the same perception stack. Identifiers must be
// disjoint between the plus and minus set of a run.
struct AgreementSets {
  std::set<std::string> real_plus;
  std::set<std::string> real_minus;
  std::set<std::string> sim_plus;
  std::set<std::string> sim_minus;
};

// Fraction of real detections whose simulated counterpart lands in the same
// class: (|R+ n S+| + |R- n S-|) / |R+ u R-|. An empty universe counts as
// perfect agreement (1.0). Throws InputError when a run's plus and minus
// sets overlap.
double detection_agreement(const AgreementSets& sets);

// Simulated over real return counts; real == 0 raises InputError.
double point_count_ratio(std::int64_t sim_points, std::int64_t real_points);

struct OccupancyAgreement {
  double precision = 0.0;  // sim cells confirmed by real
  double recall = 0.0;     // real cells reproduced by sim
  double iou = 0.0;
};

// Cell-wise overlap of two single-channel occupancy grids of equal shape.
// Empty unions/denominators count as perfect (1.0).
OccupancyAgreement occupancy_agreement(const Grid& sim_occupancy,
                                       const Grid& real_occupancy);

// Keep mask dropping each occupied cell independently with probability
// drop_rate, counter-seeded like sample_mask.
Grid random_raydrop(const Grid& occupancy, double drop_rate,
                    std::uint64_t seed);

}  // namespace surfelsim
