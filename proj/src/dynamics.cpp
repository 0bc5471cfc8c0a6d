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

#include "msirl/dynamics.hpp"

namespace msirl {

void ContinuousDynamics::validate() const {
  if (dim_x <= 0 || dim_u <= 0)
    throw ConfigError("dynamics: dim_x and dim_u must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("dynamics: sigma must be nonnegative");
  if (!drift || !input_map)
    throw ConfigError("dynamics: drift and input_map must be set");
}

ContinuousDynamics make_single_integrator(int dim, double sigma) {
  ContinuousDynamics dyn;
  dyn.dim_x = dim;
  dyn.dim_u = dim;
  dyn.sigma = sigma;
  dyn.drift = [dim](const Vec&) { return Vec::Zero(dim); };
  dyn.input_map = [dim](const Vec&) { return Mat::Identity(dim, dim); };
  dyn.jacobian = [dim](const Vec&) { return Mat::Zero(dim, dim); };
  return dyn;
}

ContinuousDynamics make_linear_dynamics(const Mat& A, const Vec& c, const Mat& G, double sigma) {
  if (A.rows() != A.cols() || A.rows() != c.size() || G.rows() != A.rows())
    throw ConfigError("linear dynamics: inconsistent shapes");
  ContinuousDynamics dyn;
  dyn.dim_x = static_cast<int>(A.rows());
  dyn.dim_u = static_cast<int>(G.cols());
  dyn.sigma = sigma;
  dyn.drift = [A, c](const Vec& x) { return Vec(A * x + c); };
  dyn.input_map = [G](const Vec&) { return G; };
  dyn.jacobian = [A](const Vec&) { return A; };
  return dyn;
}

ContinuousDynamics dynamics_by_name(const std::string& name, int dim, double sigma) {
  if (name == "single_integrator") return make_single_integrator(dim, sigma);
  throw ConfigError("unknown dynamics name: " + name);
}

namespace {

Vec checked_drift(const ContinuousDynamics& dyn, const Vec& x) {
  Vec f = dyn.drift(x);
  if (f.size() != dyn.dim_x)
    throw ConfigError("drift returned wrong dimension");
  if (!f.allFinite())
    throw NumericError("drift evaluation is not finite");
  return f;
}

Mat finite_difference_jacobian(const ContinuousDynamics& dyn, const Vec& x) {
  const int d = dyn.dim_x;
  Mat J(d, d);
  Vec xp = x, xm = x;
  for (int j = 0; j < d; ++j) {
    const double step = 1e-6 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    const Vec fp = checked_drift(dyn, xp);
    const Vec fm = checked_drift(dyn, xm);
    J.col(j) = (fp - fm) / (2.0 * step);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

} // namespace

Linearization linearize(const ContinuousDynamics& dyn, const Vec& x_n) {
  dyn.validate();
  if (x_n.size() != dyn.dim_x)
    throw ConfigError("linearize: state has wrong dimension");

  Linearization lin;
  lin.A = dyn.jacobian ? dyn.jacobian(x_n) : finite_difference_jacobian(dyn, x_n);
  if (lin.A.rows() != dyn.dim_x || lin.A.cols() != dyn.dim_x)
    throw ConfigError("jacobian has wrong shape");
  if (!lin.A.allFinite()) throw NumericError("jacobian is not finite");

  Mat G = dyn.input_map(x_n);
  if (G.rows() != dyn.dim_x || G.cols() != dyn.dim_u)
    throw ConfigError("input_map returned wrong shape");
  lin.B = dyn.sigma * G;
  lin.c = checked_drift(dyn, x_n) - lin.A * x_n;
  return lin;
}

GaussianMoments propagate_moments(const Linearization& lin, const Vec& x_n, double h,
                                  int substeps) {
  if (!(h > 0.0)) throw ConfigError("propagate_moments: h must be positive");
  if (substeps < 10) substeps = 10;

  const Mat& A = lin.A;
  const Mat BBt = lin.B * lin.B.transpose();
  const double dt = h / substeps;

  Vec mu = x_n;
  Mat S = Mat::Zero(A.rows(), A.cols());

  const auto f_mu = [&](const Vec& m) { return Vec(A * m + lin.c); };
  const auto f_S = [&](const Mat& s) { return Mat(A * s + s * A.transpose() + BBt); };

  for (int k = 0; k < substeps; ++k) {
    const Vec k1 = f_mu(mu);
    const Vec k2 = f_mu(mu + 0.5 * dt * k1);
    const Vec k3 = f_mu(mu + 0.5 * dt * k2);
    const Vec k4 = f_mu(mu + dt * k3);

    const Mat m1 = f_S(S);
    const Mat m2 = f_S(S + 0.5 * dt * m1);
    const Mat m3 = f_S(S + 0.5 * dt * m2);
    const Mat m4 = f_S(S + dt * m3);

    mu += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    S += (dt / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
  }

  GaussianMoments out;
  out.mean = mu;
  out.cov = 0.5 * (S + S.transpose());
  return out;
}

std::vector<TrajectoryPoint> simulate_sde(const ContinuousDynamics& dyn, const Vec& x0,
                                          const std::function<Vec(double, const Vec&)>& control,
                                          double t_end, double dt, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_sde(dyn, x0, control, t_end, dt, rng, nullptr);
}

std::vector<TrajectoryPoint> simulate_sde(const ContinuousDynamics& dyn, const Vec& x0,
                                          const std::function<Vec(double, const Vec&)>& control,
                                          double t_end, double dt, Rng& rng,
                                          const StepFilter& step_filter) {
  dyn.validate();
  if (!(dt > 0.0) || dt > t_end)
    throw ConfigError("simulate_sde: requires 0 < dt <= t_end");

  // The small slack keeps exact multiples of dt from losing a step to
  // rounding in the division.
  const int steps = static_cast<int>(std::floor(t_end / dt + 1e-9));
  const double sqrt_dt = std::sqrt(dt);

  std::vector<TrajectoryPoint> traj;
  traj.reserve(steps + 1);
  Vec x = x0;
  traj.push_back({0.0, x});

  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const Vec u = control(t, x);
    const Vec f = dyn.drift(x);
    const Mat G = dyn.input_map(x);
    const Vec xi = normal_vector(rng, dyn.dim_u);
    Vec x_next = x + (f + G * u) * dt + dyn.sigma * (G * xi) * sqrt_dt;
    if (!x_next.allFinite())
      throw DivergedError("simulate_sde: state diverged", t, x);
    if (step_filter) x_next = step_filter(x, x_next);
    x = std::move(x_next);
    traj.push_back({(k + 1) * dt, x});
  }
  return traj;
}

} // namespace msirl
