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

#ifndef MSIRL_IRL_HPP
#define MSIRL_IRL_HPP

#include "msirl/forward.hpp"
#include "msirl/wavelets.hpp"

namespace msirl {

/// Inverse problem instance: recover state values v = features * w from
/// transition counts recorded under an optimal policy of the chain.
/// Construction validates count consistency (sum(a) = sum(b) > 0) and full
/// column rank of the feature matrix.
struct IrlProblem {
  const MarkovChain& chain;
  const Demonstrations& demos;
  const Mat& features;

  IrlProblem(const MarkovChain& chain_, const Demonstrations& demos_, const Mat& features_);
  // The problem only references its inputs; a temporary feature matrix would
  // dangle before the first solve.
  IrlProblem(const MarkovChain&, const Demonstrations&, Mat&&) = delete;
};

struct IrlDiagnostics {
  double nll = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int level = 0;
  bool augmented = false;
  Index n_features = 0;
};

struct IrlSolution {
  Vec w;
  Vec v_hat;          // features * w, mean-centered
  Vec q_hat;          // recovered cost rate, gauged to min 0
  double c_hat = 0.0; // recovered average-cost constant
  SpMatRow policy_hat;
  IrlDiagnostics diagnostics;
};

/// Result of the coarse-to-fine cascade. When a level fails to converge the
/// cascade stops; `solutions` keeps the levels that completed.
struct HierarchyResult {
  std::vector<IrlSolution> solutions;
  bool completed = true;
  std::string error;
};

/// Negative log-likelihood of the demonstrations under v = features * w:
///   L(w) = a' v + b' log(P exp(-v)).
/// Optionally fills the analytic gradient and Hessian. Evaluation shifts by
/// min(v) inside exp/log, which leaves the value exact while preventing
/// overflow.
double nll(const IrlProblem& problem, const Vec& w, Vec* grad = nullptr, Mat* hess = nullptr);

/// Damped Newton with Armijo backtracking on the convex objective.
/// Terminates when the gradient max-norm drops to tol. Returns weights and
/// diagnostics only; finalize_solution fills the recovered quantities.
IrlSolution newton_solve(const IrlProblem& problem, const Vec& w0, double tol = 1e-9,
                         int max_iter = 200);

/// Fills v_hat (mean-centered), q_hat, c_hat and policy_hat from solution.w.
void finalize_solution(const IrlProblem& problem, IrlSolution& solution);

/// Solves levels start_level down to end_level (tree level indices, coarse
/// to fine). The coarsest level starts from w = 0; each finer level warm
/// starts from the stored inter-level scaling factor applied to the weights
/// one level up.
HierarchyResult hierarchical_solve(const MarkovChain& chain, const Demonstrations& demos,
                                   const WaveletTree& tree, int start_level, int end_level,
                                   double tol = 1e-9, int max_iter = 200);

/// Refines the level-l solution with the k highest-scoring wavelets
/// (score_wavelets on demos.b; ties prefer the finer level, then the lower
/// column index). Warm starts from w_base padded with zeros; when w_base is
/// null the base level is solved first.
IrlSolution augment_and_solve(const MarkovChain& chain, const Demonstrations& demos,
                              const WaveletTree& tree, int l, int k, const Vec* w_base = nullptr,
                              double tol = 1e-9, int max_iter = 200);

/// Inverts the linear Bellman identity pointwise:
///   h q(x) + c = v(x) + log sum_x' p(x'|x) exp(-v(x')).
/// c is not identified from demonstrations, so q is gauged to min(q) = 0 and
/// c_hat absorbs the shift. Returns (q_hat, c_hat).
std::pair<Vec, double> recover_cost(const MarkovChain& chain, const Vec& v_hat);

/// Rows of P reweighted by exp(-v_hat(x')) and renormalized.
SpMatRow recover_policy(const MarkovChain& chain, const Vec& v_hat);

/// Root-mean-square difference after mean-centering both inputs.
double rms_error(const Vec& v_hat, const Vec& v_true);

} // namespace msirl

#endif // MSIRL_IRL_HPP
