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

#ifndef MSIRL_IO_HPP
#define MSIRL_IO_HPP

#include <string>

#include "msirl/control.hpp"
#include "msirl/discretize.hpp"
#include "msirl/environment.hpp"
#include "msirl/forward.hpp"
#include "msirl/irl.hpp"
#include "msirl/wavelets.hpp"

namespace msirl::io {

/// Shortest decimal representation that parses back to the same double.
/// All CSV output goes through this so artifacts are byte-stable.
std::string format_double(double value);

void ensure_dir(const std::string& dir);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

void write_environment(const std::string& path, const Environment& env);
Environment read_environment(const std::string& path);

void write_states(const std::string& path, const StateSet& states);
StateSet read_states(const std::string& path);

/// Coordinate triplets `row,col,value` sorted by (row, col) under the given
/// schema tag (e.g. "chain", "policy").
void write_sparse(const std::string& path, const std::string& name, const SpMatRow& matrix);
SpMatRow read_sparse(const std::string& path, const std::string& name, Index rows, Index cols);

void write_chain(const std::string& dir, const MarkovChain& chain);
MarkovChain read_chain(const std::string& dir);

void write_cost(const std::string& path, const Vec& q);
Vec read_cost(const std::string& path);

void write_forward(const std::string& dir, const ForwardSolution& solution);
ForwardSolution read_forward(const std::string& dir, Index n);

void write_demos(const std::string& dir, const Demonstrations& demos);
Demonstrations read_demos(const std::string& dir, Index n);

void write_tree(const std::string& dir, const WaveletTree& tree);
WaveletTree read_tree(const std::string& dir);

/// Writes irl_<tag>.csv (`index,v_hat,q_hat`) and irl_<tag>.json; tag is
/// "level_<j>" or "augmented". rms may be NaN when no reference is known.
void write_irl_solution(const std::string& dir, const std::string& tag,
                        const IrlSolution& solution, double rms);

/// Reads back the (v_hat, q_hat) columns of an irl_<tag>.csv.
std::pair<Vec, Vec> read_irl_solution_csv(const std::string& path);

struct LevelRow {
  int level = 0;
  Index n_features = 0;
  int iterations = 0;
  double nll = 0.0;
  double rms_error = 0.0;
};

void write_levels_table(const std::string& path, const std::vector<LevelRow>& rows);
std::vector<LevelRow> read_levels_table(const std::string& path);

/// Scatter triples `x,y,value` over the sampled states.
void write_grid(const std::string& path, const StateSet& states, const Vec& values);

void write_trajectory(const std::string& dir, const ClosedLoopResult& result,
                      std::uint64_t seed, const RhcConfig& cfg);

/// Grayscale P2 image of the value field over the environment bounds with
/// nearest-state coloring; `width` pixels across, height from the aspect
/// ratio. A constant field renders monochrome.
void write_heatmap_pgm(const std::string& path, const Environment& env, const StateSet& states,
                       const Vec& values, int width = 200);

} // namespace msirl::io

#endif // MSIRL_IO_HPP
