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

#ifndef MSIRL_ENVIRONMENT_HPP
#define MSIRL_ENVIRONMENT_HPP

#include "msirl/common.hpp"

namespace msirl {

struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double cx() const { return 0.5 * (xmin + xmax); }
  double cy() const { return 0.5 * (ymin + ymax); }
};

struct Segment {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

/// Closed-segment intersection test (shared endpoints and collinear overlap
/// count as intersecting). Symmetric in its arguments.
bool segments_intersect(const Segment& a, const Segment& b);

struct Room {
  Rect rect;
  int group = 0;
};

/// Walled 2D workspace: rectangular extent, interior/exterior wall segments,
/// and room rectangles tagged with a group id.
struct Environment {
  Rect bounds;
  std::vector<Segment> walls;
  std::vector<Room> rooms;

  /// True when the straight segment p -> q crosses (or touches) any wall.
  bool segment_blocked(const Vec& p, const Vec& q) const;

  /// Index of the room containing (x, y), or -1.
  int room_of(double x, double y) const;
};

/// Plus-of-pluses room layout: up to five square rooms per group arranged
/// around a center room, and up to five groups arranged the same way at
/// triple spacing. Adjacent rooms communicate through doors centered in the
/// shared wall.
struct FractalRoomSpec {
  int groups = 5;
  int rooms_per_group = 5;
  double room_size = 1.0;
  double door_width = 0.3;

  void validate() const;
};

/// Generates walls, doors, and room records for the spec and verifies every
/// room is reachable from every other through the door graph; throws
/// StructureError otherwise.
Environment build_fractal_environment(const FractalRoomSpec& spec);

/// Door adjacency between rooms, probed with explicit segment tests against
/// the generated walls (an edge means the straight line between room centers
/// is unblocked or a shared door exists).
std::vector<std::pair<int, int>> door_adjacency(const Environment& env);

} // namespace msirl

#endif // MSIRL_ENVIRONMENT_HPP
