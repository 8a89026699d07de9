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

#include "surfelsim/kdtree.hpp"

#include <algorithm>
#include <utility>

namespace surfelsim {

namespace {
constexpr std::int32_t kLeafSize = 16;
}

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i)
    order_[i] = static_cast<std::int32_t>(i);
  if (!points_.empty())
    root_ = build(0, static_cast<std::int32_t>(points_.size()));
}

std::int32_t KdTree::build(std::int32_t first, std::int32_t count) {
  Node node;
  node.first = first;
  node.count = count;
  if (count <= kLeafSize) {
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  Vec3 lo = points_[order_[first]];
  Vec3 hi = lo;
  for (std::int32_t i = first + 1; i < first + count; ++i) {
    const Vec3& p = points_[order_[i]];
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Vec3 extent = hi - lo;
  int axis = 0;
  if (extent.y > extent[axis]) axis = 1;
  if (extent.z > extent[axis]) axis = 2;
  if (extent[axis] <= 0.0) {  // all points coincide; keep as one leaf
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  const std::int32_t mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid,
                   order_.begin() + first + count,
                   [&](std::int32_t a, std::int32_t b) {
                     const double ca = points_[a][axis];
                     const double cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  const std::int32_t left = build(first, mid - first);
  const std::int32_t right = build(mid, first + count - mid);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

std::int32_t KdTree::nearest(const Vec3& query) const {
  if (root_ < 0) return -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::int32_t best_idx = -1;
  search_nearest(root_, query, best_d2, best_idx);
  return best_idx;
}

void KdTree::search_nearest(std::int32_t ni, const Vec3& q, double& best_d2,
                            std::int32_t& best_idx) const {
  const Node& node = nodes_[ni];
  if (node.axis < 0) {
    for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
      const std::int32_t idx = order_[i];
      const double d2 = squared_norm(points_[idx] - q);
      if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
        best_d2 = d2;
        best_idx = idx;
      }
    }
    return;
  }
  const double delta = q[node.axis] - node.split;
  const std::int32_t near = delta < 0.0 ? node.left : node.right;
  const std::int32_t far = delta < 0.0 ? node.right : node.left;
  search_nearest(near, q, best_d2, best_idx);
  if (delta * delta <= best_d2) search_nearest(far, q, best_d2, best_idx);
}

void KdTree::search_radius(std::int32_t ni, const Vec3& q, double r2,
                           std::vector<std::int32_t>& out) const {
  const Node& node = nodes_[ni];
  if (node.axis < 0) {
    for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
      const std::int32_t idx = order_[i];
      if (squared_norm(points_[idx] - q) <= r2) out.push_back(idx);
    }
    return;
  }
  const double delta = q[node.axis] - node.split;
  const std::int32_t near = delta < 0.0 ? node.left : node.right;
  const std::int32_t far = delta < 0.0 ? node.right : node.left;
  search_radius(near, q, r2, out);
  if (delta * delta <= r2) search_radius(far, q, r2, out);
}

std::vector<std::int32_t> KdTree::radius_search(const Vec3& query,
                                                double radius) const {
  std::vector<std::int32_t> out;
  if (root_ < 0 || radius < 0.0) return out;
  search_radius(root_, query, radius * radius, out);
  std::sort(out.begin(), out.end(), [&](std::int32_t a, std::int32_t b) {
    const double da = squared_norm(points_[a] - query);
    const double db = squared_norm(points_[b] - query);
    return da < db || (da == db && a < b);
  });
  return out;
}

std::vector<std::int32_t> KdTree::radius_nearest(
    const Vec3& query, double radius, std::size_t max_count) const {
  std::vector<std::int32_t> out = radius_search(query, radius);
  if (out.size() > max_count) out.resize(max_count);
  return out;
}

}  // namespace surfelsim
