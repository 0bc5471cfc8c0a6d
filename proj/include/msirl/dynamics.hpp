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

#ifndef MSIRL_DYNAMICS_HPP
#define MSIRL_DYNAMICS_HPP

#include "msirl/common.hpp"

namespace msirl {

/// Control-affine SDE  dx = f(x) dt + G(x) (u dt + sigma dw).
///
/// `drift` returns f(x) (length dim_x), `input_map` returns G(x)
/// (dim_x x dim_u), `jacobian` is an optional analytic df/dx; when absent
/// the linearizer falls back to central finite differences.
struct ContinuousDynamics {
  int dim_x = 0;
  int dim_u = 0;
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&)> input_map;
  double sigma = 1.0;
  std::function<Mat(const Vec&)> jacobian; // may be empty

  void validate() const;
};

/// f(x) = 0, G(x) = I; position driven directly by velocity commands.
ContinuousDynamics make_single_integrator(int dim, double sigma);

/// Generic linear system f(x) = A x + c with constant input map G.
ContinuousDynamics make_linear_dynamics(const Mat& A, const Vec& c, const Mat& G, double sigma);

/// Looks up a dynamics model by config name ("single_integrator" built in).
ContinuousDynamics dynamics_by_name(const std::string& name, int dim, double sigma);

/// Local affine model at x_n: drift(x) ~= A x + c with B = sigma * G(x_n).
/// A x_n + c reproduces drift(x_n) exactly.
struct Linearization {
  Mat A;
  Mat B;
  Vec c;
};

struct GaussianMoments {
  Vec mean;
  Mat cov;
};

Linearization linearize(const ContinuousDynamics& dyn, const Vec& x_n);

/// Integrates  mu' = A mu + c,  Sigma' = A Sigma + Sigma A' + B B'  over
/// [0, h] from mu(0) = x_n, Sigma(0) = 0 with classical RK4; the returned
/// covariance is projected to its symmetric part.
GaussianMoments propagate_moments(const Linearization& lin, const Vec& x_n, double h,
                                  int substeps = 64);

struct TrajectoryPoint {
  double t;
  Vec x;
};

/// Optional per-step hook: maps (current state, proposed next state) to the
/// state actually taken. Collision handling plugs in here.
using StepFilter = std::function<Vec(const Vec&, const Vec&)>;

/// Euler-Maruyama simulation of the SDE under the given control law.
/// Deterministic for a fixed seed. Throws DivergedError when the state
/// leaves the finite domain.
std::vector<TrajectoryPoint> simulate_sde(const ContinuousDynamics& dyn, const Vec& x0,
                                          const std::function<Vec(double, const Vec&)>& control,
                                          double t_end, double dt, std::uint64_t seed);

/// As above with a caller-owned generator (continues its stream) and an
/// optional step filter.
std::vector<TrajectoryPoint> simulate_sde(const ContinuousDynamics& dyn, const Vec& x0,
                                          const std::function<Vec(double, const Vec&)>& control,
                                          double t_end, double dt, Rng& rng,
                                          const StepFilter& step_filter);

} // namespace msirl

#endif // MSIRL_DYNAMICS_HPP
