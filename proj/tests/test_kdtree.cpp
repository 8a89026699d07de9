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

#include <algorithm>
#include <vector>

#include "surfelsim/kdtree.hpp"
#include "surfelsim/rng.hpp"

using namespace surfelsim;

namespace {

std::vector<Vec3> random_cloud(int n, std::uint64_t seed, double extent) {
  SeqRng rng(seed);
  std::vector<Vec3> points;
  points.reserve(n);
  for (int i = 0; i < n; ++i)
    points.push_back({rng.uniform(-extent, extent),
                      rng.uniform(-extent, extent),
                      rng.uniform(-extent, extent)});
  return points;
}

// Reference answers by exhaustive scan with the tree's own tie rule.
std::int32_t brute_nearest(const std::vector<Vec3>& pts, const Vec3& q) {
  std::int32_t best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d2 = squared_norm(pts[i] - q);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<std::int32_t>(i);
    }
  }
  return best;
}

std::vector<std::int32_t> brute_radius(const std::vector<Vec3>& pts,
                                       const Vec3& q, double r) {
  std::vector<std::int32_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (squared_norm(pts[i] - q) <= r * r)
      out.push_back(static_cast<std::int32_t>(i));
  std::sort(out.begin(), out.end(), [&](std::int32_t a, std::int32_t b) {
    const double da = squared_norm(pts[a] - q);
    const double db = squared_norm(pts[b] - q);
    if (da != db) return da < db;
    return a < b;
  });
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("kdtree");

TEST_CASE("nearest matches exhaustive search") {
  const std::vector<Vec3> pts = random_cloud(500, 17, 5.0);
  const KdTree tree(pts);
  SeqRng rng(18);
  for (int i = 0; i < 300; ++i) {
    const Vec3 q{rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6)};
    CHECK(tree.nearest(q) == brute_nearest(pts, q));
  }
}

TEST_CASE("radius search matches exhaustive search including order") {
  const std::vector<Vec3> pts = random_cloud(400, 19, 3.0);
  const KdTree tree(pts);
  SeqRng rng(20);
  for (int i = 0; i < 100; ++i) {
    const Vec3 q{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
    const double r = rng.uniform(0.1, 2.5);
    CHECK(tree.radius_search(q, r) == brute_radius(pts, q, r));
  }
}

TEST_CASE("radius_nearest caps the neighbourhood") {
  const std::vector<Vec3> pts = random_cloud(400, 23, 1.0);  // dense
  const KdTree tree(pts);
  const Vec3 q{0, 0, 0};
  const auto all = tree.radius_search(q, 1.0);
  REQUIRE(all.size() > 20);
  const auto capped = tree.radius_nearest(q, 1.0, 20);
  REQUIRE(capped.size() == 20);
  // The cap keeps the closest prefix.
  for (int i = 0; i < 20; ++i) CHECK(capped[i] == all[i]);
}

TEST_CASE("distance ties resolve to the lower index") {
  // Two coincident points: both are at the same distance from any query.
  std::vector<Vec3> pts = {{1, 1, 1}, {2, 0, 0}, {1, 1, 1}};
  const KdTree tree(pts);
  CHECK(tree.nearest({1, 1, 1.1}) == 0);
  const auto in_radius = tree.radius_search({1, 1, 1}, 0.5);
  REQUIRE(in_radius.size() == 2);
  CHECK(in_radius[0] == 0);
  CHECK(in_radius[1] == 2);
}

TEST_CASE("degenerate inputs") {
  const KdTree empty;
  CHECK(empty.nearest({0, 0, 0}) == -1);
  CHECK(empty.radius_search({0, 0, 0}, 1.0).empty());

  const KdTree single(std::vector<Vec3>{{5, 5, 5}});
  CHECK(single.nearest({0, 0, 0}) == 0);

  // All points coincident: build must not recurse forever.
  const std::vector<Vec3> same(100, Vec3{1, 2, 3});
  const KdTree tree(same);
  CHECK(tree.nearest({1, 2, 3}) == 0);
  CHECK(tree.radius_search({1, 2, 3}, 0.1).size() == 100);
}

TEST_SUITE_END();
