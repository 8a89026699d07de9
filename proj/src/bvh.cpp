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

#include "surfelsim/bvh.hpp"

#include <algorithm>

namespace surfelsim {

namespace {

constexpr std::int32_t kLeafSize = 4;

// Entry distance of the ray into the box, clipped below by t_min. Returns
// false when the box is missed or lies entirely before t_min.
inline bool box_entry(const double bmin[3], const double bmax[3],
                      const Vec3& origin, const Vec3& direction, double t_min,
                      double& t_entry) {
  double tn = -std::numeric_limits<double>::infinity();
  double tf = std::numeric_limits<double>::infinity();
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {direction.x, direction.y, direction.z};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < bmin[a] || o[a] > bmax[a]) return false;
      continue;
    }
    double t0 = (bmin[a] - o[a]) / d[a];
    double t1 = (bmax[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > tn) tn = t0;
    if (t1 < tf) tf = t1;
    if (tn > tf) return false;
  }
  if (tf < t_min) return false;
  t_entry = tn;
  return true;
}

}  // namespace

void Bvh::build(std::span<const Surfel> surfels) {
  nodes_.clear();
  order_.resize(surfels.size());
  for (std::size_t i = 0; i < surfels.size(); ++i)
    order_[i] = static_cast<std::int32_t>(i);
  if (surfels.empty()) return;
  nodes_.reserve(2 * surfels.size());
  build_node(surfels, 0, static_cast<std::int32_t>(surfels.size()));
}

std::int32_t Bvh::build_node(std::span<const Surfel> surfels,
                             std::int32_t first, std::int32_t count) {
  Node node;
  node.bmin[0] = node.bmin[1] = node.bmin[2] =
      std::numeric_limits<double>::infinity();
  node.bmax[0] = node.bmax[1] = node.bmax[2] =
      -std::numeric_limits<double>::infinity();
  for (std::int32_t i = first; i < first + count; ++i) {
    const Surfel& s = surfels[order_[i]];
    const double c[3] = {s.center.x, s.center.y, s.center.z};
    for (int a = 0; a < 3; ++a) {
      node.bmin[a] = std::min(node.bmin[a], c[a] - s.radius);
      node.bmax[a] = std::max(node.bmax[a], c[a] + s.radius);
    }
  }

  if (count <= kLeafSize) {
    node.first = first;
    node.count = count;
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  int axis = 0;
  double extent = node.bmax[0] - node.bmin[0];
  for (int a = 1; a < 3; ++a) {
    const double e = node.bmax[a] - node.bmin[a];
    if (e > extent) {
      extent = e;
      axis = a;
    }
  }

  const std::int32_t mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid,
                   order_.begin() + first + count,
                   [&](std::int32_t a, std::int32_t b) {
                     const double ca = surfels[a].center[axis];
                     const double cb = surfels[b].center[axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  const std::int32_t left = build_node(surfels, first, mid - first);
  const std::int32_t right = build_node(surfels, mid, first + count - mid);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void Bvh::closest_hit(std::span<const Surfel> surfels, const Vec3& origin,
                      const Vec3& direction, double t_min, std::int32_t group,
                      SurfelHitRecord& best) const {
  if (nodes_.empty()) return;

  struct Entry {
    std::int32_t node;
    double t_entry;
  };
  Entry stack[64];
  int top = 0;

  double t_entry;
  if (!box_entry(nodes_[0].bmin, nodes_[0].bmax, origin, direction, t_min,
                 t_entry))
    return;
  stack[top++] = {0, t_entry};

  while (top > 0) {
    const Entry e = stack[--top];
    if (e.t_entry > best.t) continue;
    const Node& node = nodes_[e.node];

    if (node.count > 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        const std::int32_t idx = order_[i];
        double t;
        if (ray_disk_hit_t(origin, direction, surfels[idx], t_min, t) &&
            best.improves(t, group, idx)) {
          best.t = t;
          best.group = group;
          best.index = idx;
          best.surfel = &surfels[idx];
        }
      }
      continue;
    }

    double tl = 0.0, tr = 0.0;
    const bool hit_l = box_entry(nodes_[node.left].bmin, nodes_[node.left].bmax,
                                 origin, direction, t_min, tl) &&
                       !(tl > best.t);
    const bool hit_r =
        box_entry(nodes_[node.right].bmin, nodes_[node.right].bmax, origin,
                  direction, t_min, tr) &&
        !(tr > best.t);
    if (hit_l && hit_r) {
      // Nearer child on top of the stack.
      if (tl <= tr) {
        stack[top++] = {node.right, tr};
        stack[top++] = {node.left, tl};
      } else {
        stack[top++] = {node.left, tl};
        stack[top++] = {node.right, tr};
      }
    } else if (hit_l) {
      stack[top++] = {node.left, tl};
    } else if (hit_r) {
      stack[top++] = {node.right, tr};
    }
  }
}

}  // namespace surfelsim
