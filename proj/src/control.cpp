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

#include "msirl/control.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace msirl {

RhcConfig make_rhc_config(double h, int k_rhc, double replan_every) {
  if (!(h > 0.0)) throw ConfigError("chain step h must be positive");
  if (k_rhc < 1) throw ConfigError("k_rhc must be a positive integer");
  RhcConfig cfg;
  cfg.k_rhc = k_rhc;
  cfg.tau = h * static_cast<double>(k_rhc);
  cfg.replan_every = replan_every == 0.0 ? cfg.tau : replan_every;
  if (!(cfg.replan_every > 0.0) || cfg.replan_every > cfg.tau) {
    throw ConfigError("replan_every must lie in (0, tau]");
  }
  return cfg;
}

Mat expm(const Mat& A) {
  if (A.rows() != A.cols()) throw ConfigError("matrix exponential needs a square matrix");
  if (!A.allFinite()) throw NumericError("matrix exponential of a non-finite matrix");
  const Index n = A.rows();
  if (n == 0) return Mat(0, 0);

  // Diagonal Pade approximant of order 6 after scaling ||A|| under 1/4.
  static const double kC[7] = {1.0,       1.0 / 2.0,     5.0 / 44.0,    1.0 / 66.0,
                               1.0 / 792, 1.0 / 15840.0, 1.0 / 665280.0};
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  }
  const Mat As = A / std::pow(2.0, squarings);
  const Mat A2 = As * As;
  const Mat A4 = A2 * A2;
  const Mat A6 = A4 * A2;
  const Mat I = Mat::Identity(n, n);
  const Mat U = As * (kC[1] * I + kC[3] * A2 + kC[5] * A4);
  const Mat V = kC[0] * I + kC[2] * A2 + kC[4] * A4 + kC[6] * A6;

  Mat X = Eigen::PartialPivLU<Mat>(V - U).solve(V + U);
  for (int s = 0; s < squarings; ++s) X = X * X;
  return X;
}

Vec expected_state(const MarkovChain& chain, const SpMatRow& policy_hat, const Vec& x_cur,
                   int k_rhc) {
  const Index n = chain.size();
  if (n == 0) throw ConfigError("expected_state needs a nonempty state set");
  if (policy_hat.rows() != n || policy_hat.cols() != n) {
    throw ConfigError("policy matrix does not match the chain size");
  }
  if (x_cur.size() != chain.states.points.cols()) {
    throw ConfigError("query state has the wrong dimension");
  }
  if (k_rhc < 1) throw ConfigError("k_rhc must be a positive integer");

  Index nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    const double d2 = (chain.states.points.row(i).transpose() - x_cur).squaredNorm();
    if (d2 < best) {
      best = d2;
      nearest = i;
    }
  }

  Vec dist = Vec::Zero(n);
  dist[nearest] = 1.0;
  for (int k = 0; k < k_rhc; ++k) dist = policy_hat.transpose() * dist;
  return chain.states.points.transpose() * dist;
}

std::function<Vec(double)> rhc_control(const ContinuousDynamics& dyn, const Linearization& lin,
                                       const Vec& x_cur, const Vec& y_new, const RhcConfig& cfg) {
  dyn.validate();
  if (x_cur.size() != dyn.dim_x || y_new.size() != dyn.dim_x) {
    throw ConfigError("controller states have the wrong dimension");
  }
  if (!(cfg.tau > 0.0)) throw ConfigError("horizon tau must be positive");

  const GaussianMoments moments = propagate_moments(lin, x_cur, cfg.tau);
  Eigen::SelfAdjointEigenSolver<Mat> eig(moments.cov);
  const double l_min = eig.eigenvalues()[0];
  const double l_max = eig.eigenvalues()[dyn.dim_x - 1];
  if (!(l_min > 0.0) || l_max / l_min > 1e12) {
    throw NumericError("horizon covariance is numerically singular: the linearized pair is "
                       "uncontrollable over tau");
  }

  const Vec lambda = Eigen::LLT<Mat>(moments.cov).solve(moments.mean - y_new);
  const Mat At = lin.A.transpose();
  const Mat G = dyn.input_map(x_cur);
  const double sigma2 = dyn.sigma * dyn.sigma;
  const double tau = cfg.tau;
  return [=](double t) -> Vec {
    const double t_c = std::clamp(t, 0.0, tau);
    return -sigma2 * G.transpose() * expm(At * (tau - t_c)) * lambda;
  };
}

ClosedLoopResult run_closed_loop(const ContinuousDynamics& dyn, const MarkovChain& chain,
                                 const SpMatRow& policy_hat, const Environment& env, const Vec& x0,
                                 const RhcConfig& cfg, double t_end, double dt,
                                 std::uint64_t seed) {
  dyn.validate();
  if (dyn.dim_x != 2) throw ConfigError("closed-loop runs require planar dynamics");
  if (x0.size() != 2 || !env.bounds.contains(x0[0], x0[1])) {
    throw ConfigError("start state lies outside the environment");
  }
  if (!(cfg.tau > 0.0) || cfg.k_rhc < 1 || !(cfg.replan_every > 0.0) ||
      cfg.replan_every > cfg.tau) {
    throw ConfigError("invalid receding-horizon configuration");
  }
  if (!(t_end > 0.0) || !(dt > 0.0) || dt > cfg.replan_every) {
    throw ConfigError("requires 0 < dt <= replan_every and t_end > 0");
  }

  ClosedLoopResult result;
  Rng rng(seed);

  const StepFilter filter = [&env, &result](const Vec& from, const Vec& proposed) -> Vec {
    const Segment move{from[0], from[1], proposed[0], proposed[1]};
    const Segment* hit = nullptr;
    for (const Segment& wall : env.walls) {
      if (segments_intersect(move, wall)) {
        hit = &wall;
        break;
      }
    }
    if (hit == nullptr) return proposed;
    ++result.collisions;

    Vec tangent(2);
    tangent << hit->x2 - hit->x1, hit->y2 - hit->y1;
    tangent.normalize();
    const Vec slide = from + tangent * tangent.dot(proposed - from);
    const Segment retry{from[0], from[1], slide[0], slide[1]};
    for (const Segment& wall : env.walls) {
      if (segments_intersect(retry, wall)) return from;
    }
    return slide;
  };

  std::vector<Vec> xs{x0};
  std::vector<Vec> us;
  Vec x = x0;
  long step = 0;
  std::function<Vec(double)> controller;
  double horizon_end = 0.0;

  double t = 0.0;
  while (t_end - t > 0.5 * dt) {
    const Vec y_new = expected_state(chain, policy_hat, x, cfg.k_rhc);
    const Linearization lin = linearize(dyn, x);
    controller = rhc_control(dyn, lin, x, y_new, cfg);

    const double remaining = t_end - t;
    const long n_steps =
        std::max<long>(1, std::lround(std::min(cfg.replan_every, remaining) / dt));
    horizon_end = static_cast<double>(n_steps) * dt;

    const auto logged = [&](double t_local, const Vec&) {
      Vec u = controller(t_local);
      us.push_back(u);
      return u;
    };
    const auto segment = simulate_sde(dyn, x, logged, horizon_end, dt, rng, filter);
    for (std::size_t i = 1; i < segment.size(); ++i) xs.push_back(segment[i].x);
    step += static_cast<long>(segment.size()) - 1;
    x = xs.back();
    t = static_cast<double>(step) * dt;
  }
  us.push_back(controller(horizon_end));

  result.t.resize(xs.size());
  result.states.resize(static_cast<Index>(xs.size()), 2);
  result.controls.resize(static_cast<Index>(us.size()), dyn.dim_u);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    result.t[i] = static_cast<double>(i) * dt;
    result.states.row(static_cast<Index>(i)) = xs[i].transpose();
    result.controls.row(static_cast<Index>(i)) = us[i].transpose();
  }
  return result;
}

} // namespace msirl
