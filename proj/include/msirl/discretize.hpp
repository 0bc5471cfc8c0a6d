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

#ifndef MSIRL_DISCRETIZE_HPP
#define MSIRL_DISCRETIZE_HPP

#include "msirl/dynamics.hpp"
#include "msirl/environment.hpp"

namespace msirl {

/// Sampled states: row k of `points` is the coordinate of state k,
/// `room` holds the index of the room containing it.
struct StateSet {
  Mat points; // n x 2
  std::vector<int> room;

  Index size() const { return points.rows(); }
};

/// Draws exactly `per_room` uniform points inside every room (rejecting
/// points that land on a wall or duplicate an earlier point). Deterministic
/// per seed.
StateSet sample_states(const Environment& env, int per_room, std::uint64_t seed);

/// Sampled state set plus the sparse row-stochastic passive transition
/// matrix over it.
struct MarkovChain {
  StateSet states;
  SpMatRow P; // n x n, rows sum to 1
  double h = 0.0;

  Index size() const { return P.rows(); }
};

/// Builds the passive chain: per source state the one-step Gaussian
/// (mean/covariance from the linearized moment equations) is evaluated at
/// every candidate within `trunc_mahalanobis` standard deviations, candidates
/// behind walls are dropped, the self-transition is always kept, and the row
/// is normalized.
MarkovChain build_markov_chain(const ContinuousDynamics& dyn, const StateSet& states,
                               const Environment& env, double h, double trunc_mahalanobis);

/// Column-stochastic transpose of the passive chain (operator acting on
/// distributions).
SpMat transition_operator(const MarkovChain& chain);

} // namespace msirl

#endif // MSIRL_DISCRETIZE_HPP
