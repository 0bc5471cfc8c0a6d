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

#ifndef MSIRL_FORWARD_HPP
#define MSIRL_FORWARD_HPP

#include "msirl/discretize.hpp"

namespace msirl {

/// Solution of the average-cost linear Bellman equation
///   exp(-c) z(x) = exp(-h q(x)) * sum_x' p(x'|x) z(x').
/// z is gauged to max(z) = 1 so v = -log z has min(v) = 0.
struct ForwardSolution {
  Vec z;            // desirability, > 0
  Vec v;            // -log z
  double c = 0.0;   // optimal average cost per step
  SpMatRow policy;  // pi*(x'|x) = p(x'|x) z(x') / sum_m p(m|x) z(m)
};

/// Transition pairs and their source/destination visitation counts.
/// `transitions` may be empty when the counts are exact occupancy masses.
struct Demonstrations {
  std::vector<std::pair<int, int>> transitions;
  Vec a; // destination counts
  Vec b; // source counts

  static Demonstrations from_transitions(std::vector<std::pair<int, int>> transitions, Index n);
};

/// Connected-component labels of the directed support graph.
std::vector<int> strongly_connected_components(const SpMatRow& A);

/// Throws StructureError when the support graph has more than one strongly
/// connected component.
void require_irreducible(const SpMatRow& A, const std::string& what);

/// Principal-eigenpair solve by power iteration on diag(exp(-h q)) * P.
/// Stops once successive iterates change by <= tol and the gauged
/// eigen-residual is below 1e-9.
ForwardSolution solve_linear_bellman(const MarkovChain& chain, const Vec& q, double tol = 1e-12,
                                     int max_iter = 100000);

/// Left principal eigenvector: mu' * policy = mu', mu >= 0, sum(mu) = 1.
Vec stationary_distribution(const SpMatRow& policy, double tol = 1e-12, int max_iter = 100000);

/// Infinite-sample demonstrations: b = scale * mu, a = scale * policy' mu
/// with mu the stationary distribution of the optimal policy.
Demonstrations make_demonstrations_exact(const ForwardSolution& solution, double scale);

/// Finite-sample demonstrations from one long simulated trajectory under the
/// optimal policy (burn-in of min(1000, n/10) steps). Deterministic per seed.
Demonstrations make_demonstrations_sampled(const ForwardSolution& solution, int n_transitions,
                                           std::uint64_t seed);

} // namespace msirl

#endif // MSIRL_FORWARD_HPP
