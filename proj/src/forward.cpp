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

#include "msirl/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msirl {

Demonstrations Demonstrations::from_transitions(std::vector<std::pair<int, int>> transitions,
                                                Index n) {
  Demonstrations demos;
  demos.a = Vec::Zero(n);
  demos.b = Vec::Zero(n);
  for (const auto& [src, dst] : transitions) {
    if (src < 0 || src >= n || dst < 0 || dst >= n) {
      throw ConfigError("transition (" + std::to_string(src) + ", " + std::to_string(dst) +
                        ") is out of range for " + std::to_string(n) + " states");
    }
    demos.b[src] += 1.0;
    demos.a[dst] += 1.0;
  }
  demos.transitions = std::move(transitions);
  return demos;
}

std::vector<int> strongly_connected_components(const SpMatRow& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> comp(n, -1), index(n, -1), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int next_index = 0;
  int n_comp = 0;

  // Iterative Tarjan; each frame is (vertex, position within its edge list).
  struct Frame {
    int v;
    SpMatRow::InnerIterator it;
  };
  std::vector<Frame> frames;

  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.push_back({root, SpMatRow::InnerIterator(A, root)});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      Frame& f = frames.back();
      bool descended = false;
      for (; f.it; ++f.it) {
        const int w = static_cast<int>(f.it.col());
        if (index[w] < 0) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          ++f.it;
          frames.push_back({w, SpMatRow::InnerIterator(A, w)});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[f.v] = std::min(lowlink[f.v], index[w]);
      }
      if (descended) continue;

      const int v = f.v;
      frames.pop_back();
      if (!frames.empty()) {
        lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
      }
      if (lowlink[v] == index[v]) {
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = n_comp;
          if (w == v) break;
        }
        ++n_comp;
      }
    }
  }
  return comp;
}

void require_irreducible(const SpMatRow& A, const std::string& what) {
  const std::vector<int> comp = strongly_connected_components(A);
  const int n_comp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  if (n_comp <= 1) return;

  std::vector<int> sizes(n_comp, 0);
  std::vector<int> sample(n_comp, -1);
  for (int i = 0; i < static_cast<int>(comp.size()); ++i) {
    ++sizes[comp[i]];
    if (sample[comp[i]] < 0) sample[comp[i]] = i;
  }
  std::ostringstream msg;
  msg << what << ": support graph splits into " << n_comp << " strongly connected components"
      << " (sizes";
  for (int k = 0; k < std::min(n_comp, 8); ++k) msg << " " << sizes[k];
  if (n_comp > 8) msg << " ...";
  msg << "; e.g. states " << sample[0] << " and " << sample[1] << " cannot reach each other)";
  throw StructureError(msg.str());
}

ForwardSolution solve_linear_bellman(const MarkovChain& chain, const Vec& q, double tol,
                                     int max_iter) {
  const Index n = chain.size();
  if (q.size() != n) {
    throw ConfigError("cost vector has " + std::to_string(q.size()) + " entries, chain has " +
                      std::to_string(n) + " states");
  }
  if (!q.allFinite()) throw NumericError("state cost contains non-finite entries");
  if (tol <= 0.0) throw ConfigError("solver tolerance must be positive");
  require_irreducible(chain.P, "linear Bellman solve");

  // Eigen-residual target on the max-gauged iterate; half the guaranteed
  // bound so the returned solution clears it strictly.
  const double residual_target = 0.5e-9;
  const Vec weight = (-chain.h * q.array()).exp();

  Vec z = Vec::Constant(n, 1.0 / static_cast<double>(n));
  double lambda = 1.0;
  double residual = std::numeric_limits<double>::infinity();

  int it = 0;
  for (; it < max_iter; ++it) {
    Vec w = weight.cwiseProduct(chain.P * z); // M z, all entries positive
    lambda = w.sum();                         // Rayleigh estimate since ||z||_1 = 1
    if (!(lambda > 0.0) || !w.allFinite()) {
      throw NumericError("power iteration produced a non-positive or non-finite iterate");
    }
    residual = (w - lambda * z).lpNorm<Eigen::Infinity>() / z.maxCoeff();
    Vec z_next = w / lambda;
    const double change = (z_next - z).lpNorm<Eigen::Infinity>();
    z = std::move(z_next);
    if (change <= tol && residual <= residual_target) break;
  }
  if (it >= max_iter) {
    throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iter) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           max_iter, residual);
  }

  ForwardSolution solution;
  solution.z = z / z.maxCoeff();
  if ((solution.z.array() <= 0.0).any()) {
    throw NumericError("desirability underflowed to zero after gauging");
  }
  solution.v = -solution.z.array().log();
  solution.c = -std::log(lambda);

  const Vec r = chain.P * solution.z;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(chain.P.nonZeros()));
  for (Index i = 0; i < n; ++i) {
    for (SpMatRow::InnerIterator p(chain.P, i); p; ++p) {
      entries.emplace_back(i, p.col(), p.value() * solution.z[p.col()] / r[i]);
    }
  }
  solution.policy.resize(n, n);
  solution.policy.setFromTriplets(entries.begin(), entries.end());
  solution.policy.makeCompressed();
  return solution;
}

Vec stationary_distribution(const SpMatRow& policy, double tol, int max_iter) {
  const Index n = policy.rows();
  if (n == 0 || policy.cols() != n) throw ConfigError("policy matrix must be square and nonempty");
  if (tol <= 0.0) throw ConfigError("solver tolerance must be positive");
  require_irreducible(policy, "stationary distribution");

  Vec mu = Vec::Constant(n, 1.0 / static_cast<double>(n));
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Vec nu = policy.transpose() * mu;
    residual = (nu - mu).lpNorm<Eigen::Infinity>();
    if (residual <= tol) return mu / mu.sum();
    // Damped update: same fixed point, converges on periodic chains too.
    mu = 0.5 * (mu + nu);
    mu /= mu.sum();
  }
  throw ConvergenceError("stationary distribution did not converge in " +
                             std::to_string(max_iter) + " iterations (residual " +
                             std::to_string(residual) + ")",
                         max_iter, residual);
}

Demonstrations make_demonstrations_exact(const ForwardSolution& solution, double scale) {
  if (!(scale > 0.0)) throw ConfigError("demonstration scale must be positive");
  const Vec mu = stationary_distribution(solution.policy);
  Demonstrations demos;
  demos.b = scale * mu;
  demos.a = scale * (solution.policy.transpose() * mu);
  const double drift = (demos.a - demos.b).lpNorm<Eigen::Infinity>() / scale;
  if (drift > 1e-9) {
    throw NumericError("stationary occupancy is inconsistent under the policy (drift " +
                       std::to_string(drift) + ")");
  }
  return demos;
}

namespace {

// Index in [0, n) from one uniform draw.
int uniform_index(Rng& rng, Index n) {
  const auto k = static_cast<Index>(uniform01(rng) * static_cast<double>(n));
  return static_cast<int>(std::min(k, n - 1));
}

int step_policy(const SpMatRow& policy, int state, Rng& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  int next = state;
  for (SpMatRow::InnerIterator p(policy, state); p; ++p) {
    cum += p.value();
    next = static_cast<int>(p.col());
    if (u < cum) break;
  }
  return next;
}

} // namespace

Demonstrations make_demonstrations_sampled(const ForwardSolution& solution, int n_transitions,
                                           std::uint64_t seed) {
  if (n_transitions <= 0) throw ConfigError("n_transitions must be positive");
  const Index n = solution.policy.rows();
  Rng rng(seed);

  int state = uniform_index(rng, n);
  const int burn_in = std::min(1000, n_transitions / 10);
  for (int t = 0; t < burn_in; ++t) state = step_policy(solution.policy, state, rng);

  std::vector<std::pair<int, int>> transitions;
  transitions.reserve(static_cast<std::size_t>(n_transitions));
  for (int t = 0; t < n_transitions; ++t) {
    const int next = step_policy(solution.policy, state, rng);
    transitions.emplace_back(state, next);
    state = next;
  }
  return Demonstrations::from_transitions(std::move(transitions), n);
}

} // namespace msirl
