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

#ifndef MSIRL_CONTROL_HPP
#define MSIRL_CONTROL_HPP

#include "msirl/discretize.hpp"
#include "msirl/dynamics.hpp"
#include "msirl/environment.hpp"

namespace msirl {

/// Receding-horizon parameters. The horizon length tau is always the chain
/// step h times k_rhc; replanning happens every replan_every time units
/// (default: once per horizon).
struct RhcConfig {
  int k_rhc = 0;
  double tau = 0.0;
  double replan_every = 0.0;
};

/// Builds a validated config with tau = h * k_rhc. replan_every of 0 means
/// "use tau"; otherwise it must lie in (0, tau].
RhcConfig make_rhc_config(double h, int k_rhc, double replan_every = 0.0);

/// Matrix exponential by scaling-and-squaring with a diagonal Pade
/// approximant of order 6.
Mat expm(const Mat& A);

/// Snaps x_cur to the nearest sampled state, pushes the point distribution
/// k_rhc steps through policy_hat, and returns the probability-weighted mean
/// of the state coordinates.
Vec expected_state(const MarkovChain& chain, const SpMatRow& policy_hat, const Vec& x_cur,
                   int k_rhc);

/// Closed-form horizon controller
///   u(t) = -sigma^2 G' exp(A'(tau - t)) Sigma(tau)^{-1} (mu(tau) - y_new)
/// with (mu, Sigma) the uncontrolled moments propagated from x_cur over tau.
/// Steering to y_new this way matches the first moment exactly: the
/// correction integrates to -Sigma(tau) Sigma(tau)^{-1} (mu(tau) - y_new).
std::function<Vec(double)> rhc_control(const ContinuousDynamics& dyn, const Linearization& lin,
                                       const Vec& x_cur, const Vec& y_new, const RhcConfig& cfg);

struct ClosedLoopResult {
  std::vector<double> t;
  Mat states;   // rows aligned with t
  Mat controls; // control applied at each time (last row: end-of-horizon value)
  int collisions = 0;
};

/// Alternates expected_state -> rhc_control -> stochastic rollout until
/// t_end. Wall hits reject the offending substep and retry with the normal
/// displacement component removed. Deterministic per seed.
ClosedLoopResult run_closed_loop(const ContinuousDynamics& dyn, const MarkovChain& chain,
                                 const SpMatRow& policy_hat, const Environment& env, const Vec& x0,
                                 const RhcConfig& cfg, double t_end, double dt,
                                 std::uint64_t seed);

} // namespace msirl

#endif // MSIRL_CONTROL_HPP
