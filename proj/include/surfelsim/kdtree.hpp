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

// Static 3-d tree over a point set. All queries resolve distance ties by the
// lower original index, so results do not depend on build order internals.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::int32_t i) const { return points_[i]; }

  // Index of the closest point, -1 when empty.
  std::int32_t nearest(const Vec3& query) const;

  // All indices within radius, sorted by (distance, index).
  std::vector<std::int32_t> radius_search(const Vec3& query,
                                          double radius) const;

  // The closest max_count points within radius, sorted by (distance, index).
  std::vector<std::int32_t> radius_nearest(const Vec3& query, double radius,
                                           std::size_t max_count) const;

 private:
  struct Node {
    double split = 0.0;
    std::int32_t axis = -1;   // -1 marks a leaf
    std::int32_t left = -1;   // children for interior nodes
    std::int32_t right = -1;
    std::int32_t first = 0;   // index range into order_ for leaves
    std::int32_t count = 0;
  };

  std::int32_t build(std::int32_t first, std::int32_t count);
  void search_nearest(std::int32_t node, const Vec3& q, double& best_d2,
                      std::int32_t& best_idx) const;
  void search_radius(std::int32_t node, const Vec3& q, double r2,
                     std::vector<std::int32_t>& out) const;

  std::vector<Vec3> points_;
  std::vector<std::int32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace surfelsim
