// Copyright 2026 The msirl Authors
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

#include <algorithm>
#include <set>

#include "doctest.h"
#include "msirl/environment.hpp"
#include "test_helpers.hpp"

using namespace msirl;

namespace {

bool isect(double ax1, double ay1, double ax2, double ay2, double bx1, double by1, double bx2,
           double by2) {
  const Segment a{ax1, ay1, ax2, ay2};
  const Segment b{bx1, by1, bx2, by2};
  const bool fwd = segments_intersect(a, b);
  CHECK(fwd == segments_intersect(b, a)); // symmetric in its arguments
  return fwd;
}

std::set<std::pair<int, int>> adjacency_set(const Environment& env) {
  std::set<std::pair<int, int>> out;
  for (auto [i, j] : door_adjacency(env)) out.insert({std::min(i, j), std::max(i, j)});
  return out;
}

} // namespace

TEST_CASE("segment intersection covers crossing, touching, and collinear cases") {
  CHECK(isect(0, 0, 1, 1, 0, 1, 1, 0));        // proper crossing
  CHECK_FALSE(isect(0, 0, 1, 0, 0, 1, 1, 1));  // parallel, separated
  CHECK(isect(0, 0, 1, 0, 1, 0, 2, 1));        // shared endpoint
  CHECK(isect(0, 0, 2, 0, 1, 0, 3, 0));        // collinear overlap
  CHECK_FALSE(isect(0, 0, 1, 0, 2, 0, 3, 0));  // collinear, disjoint
  CHECK(isect(0, 0, 2, 0, 1, -1, 1, 0));       // T-junction touch
  CHECK_FALSE(isect(0, 0, 2, 0, 1, 1e-9, 1, 2)); // near miss stays a miss
}

TEST_CASE("room spec validation") {
  FractalRoomSpec spec;
  CHECK_NOTHROW(spec.validate());

  FractalRoomSpec bad = spec;
  bad.groups = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.groups = 6;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.rooms_per_group = 6;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.door_width = spec.room_size;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.door_width = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.room_size = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("two-room layout: geometry, doors, and blocking") {
  const Environment env = test::two_room_env();

  REQUIRE(env.rooms.size() == 2);
  CHECK(env.rooms[0].rect.cx() == doctest::Approx(0.0));
  CHECK(env.rooms[0].rect.cy() == doctest::Approx(0.0));
  CHECK(env.rooms[1].rect.cx() == doctest::Approx(1.0));
  CHECK(env.rooms[1].rect.cy() == doctest::Approx(0.0));
  CHECK(env.rooms[0].rect.width() == doctest::Approx(1.0));
  CHECK(env.bounds.contains(env.rooms[1].rect.xmax, env.rooms[1].rect.ymax));

  Vec a(2), b(2);

  // Center-to-center passes through the centered door.
  a << 0.0, 0.0;
  b << 1.0, 0.0;
  CHECK_FALSE(env.segment_blocked(a, b));

  // Off-door crossing of the shared wall is blocked.
  a << 0.0, 0.3;
  b << 1.0, 0.3;
  CHECK(env.segment_blocked(a, b));

  // Moves inside one room are free; leaving the outer boundary is blocked.
  a << 0.0, 0.0;
  b << 0.0, 0.2;
  CHECK_FALSE(env.segment_blocked(a, b));
  b << 0.0, 2.0;
  CHECK(env.segment_blocked(a, b));

  CHECK(adjacency_set(env) == std::set<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("room_of maps points to rooms and -1 outside") {
  const Environment env = test::two_room_env();
  CHECK(env.room_of(0.2, 0.0) == 0);
  CHECK(env.room_of(1.2, 0.1) == 1);
  CHECK(env.room_of(5.0, 5.0) == -1);
  // Shared boundary resolves to the lowest containing index.
  CHECK(env.room_of(0.5, 0.0) == 0);
}

TEST_CASE("single group of five rooms forms a plus around the center room") {
  FractalRoomSpec spec;
  spec.groups = 1;
  spec.rooms_per_group = 5;
  const Environment env = build_fractal_environment(spec);

  REQUIRE(env.rooms.size() == 5);
  for (const Room& room : env.rooms) CHECK(room.group == 0);

  const auto adj = adjacency_set(env);
  CHECK(adj == std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

TEST_CASE("full five-by-five layout: 25 rooms, 24 door edges, spanning tree") {
  FractalRoomSpec spec; // defaults: 5 groups x 5 rooms
  const Environment env = build_fractal_environment(spec);

  REQUIRE(env.rooms.size() == 25);
  std::set<int> groups;
  for (const Room& room : env.rooms) groups.insert(room.group);
  CHECK(groups.size() == 5);

  const auto adj = adjacency_set(env);
  CHECK(adj.size() == 24); // 4 intra-group edges per group + 4 inter-group doors

  // 25 nodes with 24 edges and full reachability (the builder verified it)
  // means the door graph is exactly a spanning tree.
  std::vector<int> comp(25);
  for (int i = 0; i < 25; ++i) comp[i] = i;
  const std::function<int(int)> find = [&](int v) {
    while (comp[v] != v) v = comp[v] = comp[comp[v]];
    return v;
  };
  for (auto [i, j] : adj) comp[find(i)] = find(j);
  std::set<int> roots;
  for (int i = 0; i < 25; ++i) roots.insert(find(i));
  CHECK(roots.size() == 1);
}

TEST_CASE("environment construction is deterministic") {
  FractalRoomSpec spec;
  const Environment e1 = build_fractal_environment(spec);
  const Environment e2 = build_fractal_environment(spec);
  REQUIRE(e1.walls.size() == e2.walls.size());
  for (std::size_t k = 0; k < e1.walls.size(); ++k) {
    CHECK(e1.walls[k].x1 == e2.walls[k].x1);
    CHECK(e1.walls[k].y1 == e2.walls[k].y1);
    CHECK(e1.walls[k].x2 == e2.walls[k].x2);
    CHECK(e1.walls[k].y2 == e2.walls[k].y2);
  }
}

TEST_CASE("door width scales the open passage") {
  FractalRoomSpec wide;
  wide.groups = 1;
  wide.rooms_per_group = 2;
  wide.door_width = 0.8;
  const Environment env = build_fractal_environment(wide);

  Vec a(2), b(2);
  a << 0.0, 0.35;
  b << 1.0, 0.35; // inside the wide door, outside a 0.3 one
  CHECK_FALSE(env.segment_blocked(a, b));

  const Environment narrow = test::two_room_env();
  CHECK(narrow.segment_blocked(a, b));
}
