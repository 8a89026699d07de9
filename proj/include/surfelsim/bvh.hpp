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
#include <limits>
#include <span>
#include <vector>

#include "surfelsim/geometry.hpp"

namespace surfelsim {

// Closest accepted intersection plus the keys that order candidates.
// Candidates compare by (t, group, index); the full key makes the winner
// unique even when two disks are pierced at the same parametric distance,
// so accelerated and exhaustive queries can be compared cell for cell.
struct SurfelHitRecord {
  double t = std::numeric_limits<double>::infinity();
  std::int32_t group = std::numeric_limits<std::int32_t>::max();
  std::int32_t index = -1;
  const Surfel* surfel = nullptr;

  bool valid() const { return index >= 0; }

  bool improves(double ct, std::int32_t cgroup, std::int32_t cindex) const {
    if (ct != t) return ct < t;
    if (cgroup != group) return cgroup < group;
    return cindex < index;
  }
};

// Binary bounding-volume hierarchy over a surfel array. The tree stores only
// indices; queries take the same span the tree was built from, so the caller
// owns surfel storage and lifetime.
class Bvh {
 public:
  Bvh() = default;

  // Median split on the longest AABB axis, at most four surfels per leaf.
  // Surfel boxes are center +/- radius per axis.
  void build(std::span<const Surfel> surfels);

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return order_.size(); }

  // Updates best with the closest disk intersection at t > t_min, tagging
  // accepted candidates with this tree's group id. Subtrees whose entry
  // distance is strictly beyond best.t are pruned, so exact ties survive
  // and resolve through the record's ordering.
  void closest_hit(std::span<const Surfel> surfels, const Vec3& origin,
                   const Vec3& direction, double t_min, std::int32_t group,
                   SurfelHitRecord& best) const;

 private:
  struct Node {
    double bmin[3];
    double bmax[3];
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t first = 0;
    std::int32_t count = 0;  // > 0 marks a leaf
  };

  std::int32_t build_node(std::span<const Surfel> surfels, std::int32_t first,
                          std::int32_t count);

  std::vector<Node> nodes_;
  std::vector<std::int32_t> order_;
};

}  // namespace surfelsim
