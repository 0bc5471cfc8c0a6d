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

#include "msirl/irl.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace msirl {
namespace {

void check_full_column_rank(const Mat& features) {
  const Index m = features.cols();
  if (features.rows() == m && features.isIdentity(0.0)) return;
  if (m <= 500) {
    Eigen::BDCSVD<Mat> svd(features);
    const double s_max = svd.singularValues()[0];
    const double s_min = svd.singularValues()[m - 1];
    if (s_min <= 1e-10 * std::max(1.0, s_max)) {
      throw ConfigError("feature matrix is column-rank deficient (smallest singular value " +
                        std::to_string(s_min) + ")");
    }
    return;
  }
  const Mat gram = features.transpose() * features;
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  const double l_max = eig.eigenvalues()[m - 1];
  const double l_min = eig.eigenvalues()[0];
  if (l_min <= 1e-20 * std::max(1.0, l_max)) {
    throw ConfigError("feature matrix is column-rank deficient (Gram eigenvalue " +
                      std::to_string(l_min) + ")");
  }
}

} // namespace

IrlProblem::IrlProblem(const MarkovChain& chain_, const Demonstrations& demos_,
                       const Mat& features_)
    : chain(chain_), demos(demos_), features(features_) {
  const Index n = chain.size();
  if (demos.a.size() != n || demos.b.size() != n) {
    throw ConfigError("demonstration counts do not match the chain size");
  }
  if ((demos.a.array() < 0.0).any() || (demos.b.array() < 0.0).any()) {
    throw ConfigError("demonstration counts must be nonnegative");
  }
  const double sum_a = demos.a.sum();
  const double sum_b = demos.b.sum();
  if (!(sum_b > 0.0)) throw ConfigError("demonstrations are empty");
  if (std::abs(sum_a - sum_b) > 1e-9 * sum_b) {
    throw ConfigError("source and destination counts have different totals");
  }
  if (features.rows() != n) throw ConfigError("feature matrix rows do not match the chain size");
  if (features.cols() < 1) throw ConfigError("feature matrix has no columns");
  check_full_column_rank(features);
}

double nll(const IrlProblem& problem, const Vec& w, Vec* grad, Mat* hess) {
  const Mat& phi = problem.features;
  if (w.size() != phi.cols()) throw ConfigError("weight vector does not match feature count");
  const Vec v = phi * w;
  if (!v.allFinite()) throw NumericError("value estimate is not finite");

  const Vec& a = problem.demos.a;
  const Vec& b = problem.demos.b;
  const SpMatRow& P = problem.chain.P;
  const Index n = v.size();

  const double shift = v.minCoeff();
  const Vec z = (-(v.array() - shift)).exp(); // in (0, 1]
  const Vec r = P * z;

  double log_term = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (b[i] <= 0.0) continue;
    if (r[i] <= 0.0) {
      throw NumericError("demonstrated source state " + std::to_string(i) +
                         " has zero reachable desirability");
    }
    log_term += b[i] * std::log(r[i]);
  }
  const double value = a.dot(v) + log_term - shift * b.sum();

  if (grad == nullptr && hess == nullptr) return value;

  Vec ratio = Vec::Zero(n); // b / r, zero where b is zero
  for (Index i = 0; i < n; ++i) {
    if (b[i] > 0.0) ratio[i] = b[i] / r[i];
  }
  const Vec d = z.cwiseProduct(P.transpose() * ratio);
  if (grad != nullptr) *grad = phi.transpose() * (a - d);

  if (hess != nullptr) {
    // H = phi' (diag(d) - K'K) phi with K = diag(sqrt(b)/r) P diag(z).
    SpMatRow K = P;
    for (Index i = 0; i < n; ++i) {
      const double row_scale = b[i] > 0.0 ? std::sqrt(b[i]) / r[i] : 0.0;
      for (SpMatRow::InnerIterator it(K, i); it; ++it) {
        it.valueRef() *= row_scale * z[it.col()];
      }
    }
    const Mat K_phi = K * phi;
    *hess = phi.transpose() * d.asDiagonal() * phi - K_phi.transpose() * K_phi;
    *hess = 0.5 * (*hess + hess->transpose());
  }
  return value;
}

IrlSolution newton_solve(const IrlProblem& problem, const Vec& w0, double tol, int max_iter) {
  if (w0.size() != problem.features.cols()) {
    throw ConfigError("initial weights do not match feature count");
  }
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");

  const Index m = problem.features.cols();
  Vec w = w0;
  Vec grad(m);
  Mat hess(m, m);
  double value = nll(problem, w, &grad, &hess);

  IrlSolution solution;
  int it = 0;
  for (; it < max_iter; ++it) {
    const double grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm <= tol) break;

    const double ridge = 1e-9 * std::max(hess.trace(), 1e-30 * static_cast<double>(m)) /
                         static_cast<double>(m);
    Mat damped = hess;
    damped.diagonal().array() += ridge;
    const Vec step = Eigen::LDLT<Mat>(damped).solve(-grad);
    if (!step.allFinite()) throw NumericError("Newton step is not finite");
    const double slope = grad.dot(step);

    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Vec w_try = w + alpha * step;
      double value_try;
      try {
        value_try = nll(problem, w_try);
      } catch (const NumericError&) {
        alpha *= 0.5;
        continue;
      }
      if (std::isfinite(value_try) && value_try <= value + 1e-4 * alpha * slope) {
        w = w_try;
        value = value_try;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      throw ConvergenceError("line search failed after 60 halvings (gradient norm " +
                                 std::to_string(grad_norm) + ")",
                             it, grad_norm);
    }
    const double prev = value;
    value = nll(problem, w, &grad, &hess);
    if (value > prev) throw NumericError("objective increased on an accepted step");
  }

  const double grad_norm = grad.lpNorm<Eigen::Infinity>();
  if (grad_norm > tol) {
    throw ConvergenceError("Newton did not reach tolerance in " + std::to_string(max_iter) +
                               " iterations (gradient norm " + std::to_string(grad_norm) + ")",
                           max_iter, grad_norm);
  }
  solution.w = w;
  solution.diagnostics.nll = value;
  solution.diagnostics.grad_norm = grad_norm;
  solution.diagnostics.iterations = it;
  solution.diagnostics.n_features = m;
  return solution;
}

void finalize_solution(const IrlProblem& problem, IrlSolution& solution) {
  Vec v = problem.features * solution.w;
  auto [q_hat, c_hat] = recover_cost(problem.chain, v);
  solution.policy_hat = recover_policy(problem.chain, v);
  solution.q_hat = std::move(q_hat);
  solution.c_hat = c_hat;
  solution.v_hat = v.array() - v.mean();
}

HierarchyResult hierarchical_solve(const MarkovChain& chain, const Demonstrations& demos,
                                   const WaveletTree& tree, int start_level, int end_level,
                                   double tol, int max_iter) {
  if (end_level < 1 || start_level < end_level || start_level > tree.n_levels()) {
    throw ConfigError("level range [" + std::to_string(end_level) + ", " +
                      std::to_string(start_level) + "] is invalid for a tree of depth " +
                      std::to_string(tree.n_levels()));
  }

  HierarchyResult result;
  Vec w0 = Vec::Zero(tree.dims[static_cast<std::size_t>(start_level)]);
  for (int level = start_level; level >= end_level; --level) {
    const Mat phi = unpack(tree, level);
    const IrlProblem problem(chain, demos, phi);
    IrlSolution solution;
    try {
      solution = newton_solve(problem, w0, tol, max_iter);
    } catch (const Error& err) {
      result.completed = false;
      result.error = "level " + std::to_string(level) + ": " + err.what();
      return result;
    }
    solution.diagnostics.level = level;
    finalize_solution(problem, solution);
    if (level > end_level) {
      w0 = tree.levels[static_cast<std::size_t>(level - 1)].scaling * solution.w;
    }
    result.solutions.push_back(std::move(solution));
  }
  return result;
}

IrlSolution augment_and_solve(const MarkovChain& chain, const Demonstrations& demos,
                              const WaveletTree& tree, int l, int k, const Vec* w_base,
                              double tol, int max_iter) {
  if (l < 1 || l > tree.n_levels()) {
    throw ConfigError("base level " + std::to_string(l) + " is out of range");
  }
  const Index n_wavelets = tree.dims[0] - tree.dims[static_cast<std::size_t>(l)];
  if (k < 0 || k > n_wavelets) {
    throw ConfigError("wavelet count " + std::to_string(k) + " is out of range [0, " +
                      std::to_string(n_wavelets) + "]");
  }

  const Mat base = unpack(tree, l);
  Vec w0;
  if (w_base != nullptr) {
    if (w_base->size() != base.cols()) {
      throw ConfigError("base weights do not match the base level feature count");
    }
    w0 = *w_base;
  } else {
    const IrlProblem base_problem(chain, demos, base);
    w0 = newton_solve(base_problem, Vec::Zero(base.cols()), tol, max_iter).w;
  }

  const Mat wavelets = unpack_wavelets(tree, l);
  const Vec scores = score_wavelets(demos.b, wavelets);
  // Stable descending sort: equal scores resolve to the finer level and
  // lower column index, which is the concatenation order of the wavelets.
  std::vector<int> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](int lhs, int rhs) { return scores[lhs] > scores[rhs]; });

  Mat phi(tree.dims[0], base.cols() + k);
  phi.leftCols(base.cols()) = base;
  for (int c = 0; c < k; ++c) {
    phi.col(base.cols() + c) = wavelets.col(order[static_cast<std::size_t>(c)]);
  }

  Vec w_start = Vec::Zero(phi.cols());
  w_start.head(base.cols()) = w0;

  const IrlProblem problem(chain, demos, phi);
  IrlSolution solution = newton_solve(problem, w_start, tol, max_iter);
  solution.diagnostics.level = l;
  solution.diagnostics.augmented = true;
  finalize_solution(problem, solution);
  return solution;
}

std::pair<Vec, double> recover_cost(const MarkovChain& chain, const Vec& v_hat) {
  const Index n = chain.size();
  if (v_hat.size() != n) throw ConfigError("value vector does not match the chain size");
  if (!v_hat.allFinite()) throw NumericError("value vector is not finite");

  const double shift = v_hat.minCoeff();
  const Vec z = (-(v_hat.array() - shift)).exp();
  const Vec r = chain.P * z;
  // v + log G[z] computed in the shifted gauge; the shifts cancel exactly.
  const Vec residual = (v_hat.array() - shift) + r.array().log();
  const double c_hat = residual.minCoeff();
  Vec q_hat = (residual.array() - c_hat) / chain.h;
  return {std::move(q_hat), c_hat};
}

SpMatRow recover_policy(const MarkovChain& chain, const Vec& v_hat) {
  const Index n = chain.size();
  if (v_hat.size() != n) throw ConfigError("value vector does not match the chain size");
  if (!v_hat.allFinite()) throw NumericError("value vector is not finite");

  const double shift = v_hat.minCoeff();
  const Vec z = (-(v_hat.array() - shift)).exp();
  SpMatRow policy = chain.P;
  for (Index i = 0; i < n; ++i) {
    double denom = 0.0;
    for (SpMatRow::InnerIterator it(policy, i); it; ++it) denom += it.value() * z[it.col()];
    for (SpMatRow::InnerIterator it(policy, i); it; ++it) {
      it.valueRef() *= z[it.col()] / denom;
    }
  }
  return policy;
}

double rms_error(const Vec& v_hat, const Vec& v_true) {
  if (v_hat.size() != v_true.size()) throw ConfigError("vectors have different lengths");
  const Vec d = (v_hat.array() - v_hat.mean()) - (v_true.array() - v_true.mean());
  return std::sqrt(d.squaredNorm() / static_cast<double>(d.size()));
}

} // namespace msirl
