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

#ifndef MSIRL_CONFIG_HPP
#define MSIRL_CONFIG_HPP

#include <string>

#include "msirl/environment.hpp"

namespace msirl {

/// Ground-truth state cost definition for experiment runs.
///   goal_room — `low` inside room `room`, `high` elsewhere;
///   quadratic — weight * squared distance to the goal room's center;
///   uniform   — `low` everywhere (passive-dynamics sanity runs).
struct CostConfig {
  std::string type = "goal_room";
  int room = 0;
  double low = 0.0;
  double high = 1.0;
  double weight = 1.0;
};

struct DynamicsConfig {
  std::string name = "single_integrator";
  double h = 0.1;
  double sigma = 1.0;
};

struct SamplingConfig {
  int per_room = 20;
  std::uint64_t seed = 1;
};

struct TruncationConfig {
  double trunc_mahalanobis = 3.0;
};

struct WaveletsConfig {
  double epsilon = 1e-4;
  int max_levels = 20;
};

struct DemosConfig {
  std::string mode = "exact"; // "exact" | "sampled"
  // Exact mode: total occupancy mass. Unit mass is the occupancy measure
  // itself and keeps the likelihood scale independent of the state count;
  // large masses push the absolute gradient tolerance below double
  // resolution on deep coarse levels.
  double scale = 1.0;
  long n_transitions = 100000;
  std::uint64_t seed = 2;
};

struct IrlConfig {
  int start_level = 0; // 0 = start from the deepest tree level
  int end_level = 1;
  int augment_k = 0; // -1 = all wavelets above end_level
  double tol = 1e-9;
  int max_iter = 200;
};

struct ForwardConfig {
  double tol = 1e-12;
  int max_iter = 100000;
};

struct ControlConfig {
  int k_rhc = 5;
  double t_end = 20.0;
  double dt = 0.01;
  std::uint64_t seed = 3;
  bool has_x0 = false; // default start: center of the last room
  double x0_x = 0.0;
  double x0_y = 0.0;
};

struct ExperimentConfig {
  std::string env_path;     // when set, load the environment from this JSON
  FractalRoomSpec env_spec; // otherwise build it from this spec
  DynamicsConfig dynamics;
  SamplingConfig sampling;
  TruncationConfig truncation;
  WaveletsConfig wavelets;
  CostConfig cost;
  DemosConfig demos;
  IrlConfig irl;
  ForwardConfig forward;
  ControlConfig control;
  std::string output_dir = "out";

  void validate() const;
};

/// Parses a config JSON document. Unknown keys and out-of-range values are
/// rejected. parse(dump(cfg)) reproduces cfg exactly.
ExperimentConfig parse_config(const std::string& json_text);
std::string dump_config(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

} // namespace msirl

#endif // MSIRL_CONFIG_HPP
