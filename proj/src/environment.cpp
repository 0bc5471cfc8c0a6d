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

#include "msirl/environment.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace msirl {

namespace {

int orientation(double ax, double ay, double bx, double by, double cx, double cy) {
  const double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

// Collinear point-on-segment check.
bool on_segment(double ax, double ay, double bx, double by, double px, double py) {
  return std::min(ax, bx) <= px && px <= std::max(ax, bx) &&
         std::min(ay, by) <= py && py <= std::max(ay, by);
}

} // namespace

bool segments_intersect(const Segment& a, const Segment& b) {
  const int o1 = orientation(a.x1, a.y1, a.x2, a.y2, b.x1, b.y1);
  const int o2 = orientation(a.x1, a.y1, a.x2, a.y2, b.x2, b.y2);
  const int o3 = orientation(b.x1, b.y1, b.x2, b.y2, a.x1, a.y1);
  const int o4 = orientation(b.x1, b.y1, b.x2, b.y2, a.x2, a.y2);

  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a.x1, a.y1, a.x2, a.y2, b.x1, b.y1)) return true;
  if (o2 == 0 && on_segment(a.x1, a.y1, a.x2, a.y2, b.x2, b.y2)) return true;
  if (o3 == 0 && on_segment(b.x1, b.y1, b.x2, b.y2, a.x1, a.y1)) return true;
  if (o4 == 0 && on_segment(b.x1, b.y1, b.x2, b.y2, a.x2, a.y2)) return true;
  return false;
}

bool Environment::segment_blocked(const Vec& p, const Vec& q) const {
  const Segment s{p[0], p[1], q[0], q[1]};
  for (const Segment& w : walls)
    if (segments_intersect(s, w)) return true;
  return false;
}

int Environment::room_of(double x, double y) const {
  for (std::size_t i = 0; i < rooms.size(); ++i)
    if (rooms[i].rect.contains(x, y)) return static_cast<int>(i);
  return -1;
}

void FractalRoomSpec::validate() const {
  if (groups < 1 || groups > 5)
    throw ConfigError("fractal environment: groups must be in [1, 5]");
  if (rooms_per_group < 1 || rooms_per_group > 5)
    throw ConfigError("fractal environment: rooms_per_group must be in [1, 5]");
  if (!(room_size > 0.0)) throw ConfigError("fractal environment: room_size must be positive");
  if (!(door_width > 0.0 && door_width < room_size))
    throw ConfigError("fractal environment: requires 0 < door_width < room_size");
}

namespace {

// Plus positions in placement order: center, east, north, west, south.
constexpr int kPlusX[5] = {0, 1, 0, -1, 0};
constexpr int kPlusY[5] = {0, 0, 1, 0, -1};

struct EdgeKey {
  int ix, iy;
  bool vertical; // wall between (ix,iy) and (ix+1,iy); else (ix,iy)-(ix,iy+1)
  bool operator<(const EdgeKey& o) const {
    return std::tie(ix, iy, vertical) < std::tie(o.ix, o.iy, o.vertical);
  }
};

} // namespace

Environment build_fractal_environment(const FractalRoomSpec& spec) {
  spec.validate();
  const double s = spec.room_size;
  const double half_door = 0.5 * spec.door_width;

  // Room lattice cells, group-major.
  std::map<std::pair<int, int>, int> cell_to_room;
  std::vector<std::pair<int, int>> cells;
  Environment env;
  for (int g = 0; g < spec.groups; ++g) {
    for (int r = 0; r < spec.rooms_per_group; ++r) {
      const int ix = 3 * kPlusX[g] + kPlusX[r];
      const int iy = 3 * kPlusY[g] + kPlusY[r];
      cell_to_room[{ix, iy}] = static_cast<int>(cells.size());
      cells.emplace_back(ix, iy);
      Room room;
      room.rect = Rect{ix * s - 0.5 * s, iy * s - 0.5 * s, ix * s + 0.5 * s, iy * s + 0.5 * s};
      room.group = g;
      env.rooms.push_back(room);
    }
  }

  int min_ix = cells[0].first, max_ix = cells[0].first;
  int min_iy = cells[0].second, max_iy = cells[0].second;
  for (const auto& [ix, iy] : cells) {
    min_ix = std::min(min_ix, ix);
    max_ix = std::max(max_ix, ix);
    min_iy = std::min(min_iy, iy);
    max_iy = std::max(max_iy, iy);
  }
  env.bounds = Rect{(min_ix - 0.5) * s, (min_iy - 0.5) * s, (max_ix + 0.5) * s, (max_iy + 0.5) * s};

  // Each room contributes four lattice edges; dedupe, then emit a full wall
  // or two pieces around a centered door when both neighbor cells exist.
  std::set<EdgeKey> edges;
  for (const auto& [ix, iy] : cells) {
    edges.insert({ix, iy, true});      // right
    edges.insert({ix - 1, iy, true});  // left
    edges.insert({ix, iy, false});     // top
    edges.insert({ix, iy - 1, false}); // bottom
  }

  for (const EdgeKey& e : edges) {
    const bool door = e.vertical
                          ? cell_to_room.count({e.ix, e.iy}) && cell_to_room.count({e.ix + 1, e.iy})
                          : cell_to_room.count({e.ix, e.iy}) && cell_to_room.count({e.ix, e.iy + 1});
    if (e.vertical) {
      const double x = (e.ix + 0.5) * s;
      const double ylo = (e.iy - 0.5) * s, yhi = (e.iy + 0.5) * s;
      if (door) {
        env.walls.push_back({x, ylo, x, e.iy * s - half_door});
        env.walls.push_back({x, e.iy * s + half_door, x, yhi});
      } else {
        env.walls.push_back({x, ylo, x, yhi});
      }
    } else {
      const double y = (e.iy + 0.5) * s;
      const double xlo = (e.ix - 0.5) * s, xhi = (e.ix + 0.5) * s;
      if (door) {
        env.walls.push_back({xlo, y, e.ix * s - half_door, y});
        env.walls.push_back({e.ix * s + half_door, y, xhi, y});
      } else {
        env.walls.push_back({xlo, y, xhi, y});
      }
    }
  }

  // Reachability over the door graph, probed against the generated walls.
  const auto adj = door_adjacency(env);
  std::vector<std::vector<int>> graph(env.rooms.size());
  for (const auto& [i, j] : adj) {
    graph[i].push_back(j);
    graph[j].push_back(i);
  }
  std::vector<char> seen(env.rooms.size(), 0);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!bfs.empty()) {
    const int cur = bfs.front();
    bfs.pop();
    for (int nxt : graph[cur])
      if (!seen[nxt]) {
        seen[nxt] = 1;
        ++reached;
        bfs.push(nxt);
      }
  }
  if (reached != env.rooms.size())
    throw StructureError("fractal environment: " +
                         std::to_string(env.rooms.size() - reached) +
                         " room(s) unreachable; spec is inconsistent");
  return env;
}

std::vector<std::pair<int, int>> door_adjacency(const Environment& env) {
  std::vector<std::pair<int, int>> adj;
  const double tol = 1e-9;
  for (std::size_t i = 0; i < env.rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < env.rooms.size(); ++j) {
      const Rect& a = env.rooms[i].rect;
      const Rect& b = env.rooms[j].rect;
      const bool share_x = std::abs(a.xmax - b.xmin) < tol || std::abs(b.xmax - a.xmin) < tol;
      const bool share_y = std::abs(a.ymax - b.ymin) < tol || std::abs(b.ymax - a.ymin) < tol;
      const bool overlap_y = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin) > tol;
      const bool overlap_x = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin) > tol;
      if (!((share_x && overlap_y) || (share_y && overlap_x))) continue;
      Vec pa(2), pb(2);
      pa << a.cx(), a.cy();
      pb << b.cx(), b.cy();
      if (!env.segment_blocked(pa, pb))
        adj.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return adj;
}

} // namespace msirl
