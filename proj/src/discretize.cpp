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

#include "msirl/discretize.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>

namespace msirl {

namespace {

double point_segment_distance(double px, double py, const Segment& s) {
  const double dx = s.x2 - s.x1, dy = s.y2 - s.y1;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - s.x1) * dx + (py - s.y1) * dy) / len2, 0.0, 1.0);
  const double cx = s.x1 + t * dx, cy = s.y1 + t * dy;
  return std::hypot(px - cx, py - cy);
}

bool on_any_wall(const Environment& env, double x, double y) {
  for (const Segment& w : env.walls)
    if (point_segment_distance(x, y, w) < 1e-12) return true;
  return false;
}

// Uniform bucket grid over 2D points for radius queries.
class PointGrid {
public:
  PointGrid(const Mat& pts, double cell) : pts_(pts), cell_(std::max(cell, 1e-12)) {
    x0_ = pts.col(0).minCoeff();
    y0_ = pts.col(1).minCoeff();
    nx_ = static_cast<int>((pts.col(0).maxCoeff() - x0_) / cell_) + 1;
    ny_ = static_cast<int>((pts.col(1).maxCoeff() - y0_) / cell_) + 1;
    bins_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (Index i = 0; i < pts.rows(); ++i)
      bins_[bin_of(pts(i, 0), pts(i, 1))].push_back(static_cast<int>(i));
  }

  void query_box(double xmin, double ymin, double xmax, double ymax,
                 std::vector<int>& out) const {
    out.clear();
    const int cx0 = std::clamp(static_cast<int>((xmin - x0_) / cell_), 0, nx_ - 1);
    const int cx1 = std::clamp(static_cast<int>((xmax - x0_) / cell_), 0, nx_ - 1);
    const int cy0 = std::clamp(static_cast<int>((ymin - y0_) / cell_), 0, ny_ - 1);
    const int cy1 = std::clamp(static_cast<int>((ymax - y0_) / cell_), 0, ny_ - 1);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx)
        for (int idx : bins_[static_cast<std::size_t>(cy) * nx_ + cx]) out.push_back(idx);
  }

private:
  std::size_t bin_of(double x, double y) const {
    const int cx = std::clamp(static_cast<int>((x - x0_) / cell_), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>((y - y0_) / cell_), 0, ny_ - 1);
    return static_cast<std::size_t>(cy) * nx_ + cx;
  }

  const Mat& pts_;
  double cell_, x0_, y0_;
  int nx_, ny_;
  std::vector<std::vector<int>> bins_;
};

} // namespace

StateSet sample_states(const Environment& env, int per_room, std::uint64_t seed) {
  if (per_room < 1) throw ConfigError("sample_states: per_room must be >= 1");
  if (env.rooms.empty()) throw ConfigError("sample_states: environment has no rooms");

  Rng rng(seed);
  const Index n = static_cast<Index>(env.rooms.size()) * per_room;
  StateSet states;
  states.points.resize(n, 2);
  states.room.resize(n);

  std::set<std::pair<double, double>> used;
  Index k = 0;
  for (std::size_t r = 0; r < env.rooms.size(); ++r) {
    const Rect& rect = env.rooms[r].rect;
    for (int i = 0; i < per_room; ++i) {
      double x, y;
      do {
        x = rect.xmin + uniform01(rng) * rect.width();
        y = rect.ymin + uniform01(rng) * rect.height();
      } while (on_any_wall(env, x, y) || used.count({x, y}) > 0);
      used.insert({x, y});
      states.points(k, 0) = x;
      states.points(k, 1) = y;
      states.room[k] = static_cast<int>(r);
      ++k;
    }
  }
  return states;
}

MarkovChain build_markov_chain(const ContinuousDynamics& dyn, const StateSet& states,
                               const Environment& env, double h, double trunc_mahalanobis) {
  if (states.size() == 0) throw ConfigError("build_markov_chain: empty state set");
  if (!(h > 0.0)) throw ConfigError("build_markov_chain: h must be positive");
  if (!(trunc_mahalanobis > 0.0))
    throw ConfigError("build_markov_chain: truncation radius must be positive");
  if (dyn.dim_x != 2) throw ConfigError("build_markov_chain: requires 2D dynamics");

  const Index n = states.size();
  const double r2_max = trunc_mahalanobis * trunc_mahalanobis;

  // One-step Gaussian per source state.
  std::vector<GaussianMoments> moments(n);
  std::vector<Eigen::LLT<Mat>> chol(n);
  double euclid_radius = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Vec x = states.points.row(i).transpose();
    moments[i] = propagate_moments(linearize(dyn, x), x, h);
    chol[i].compute(moments[i].cov);
    if (chol[i].info() != Eigen::Success)
      throw NumericError("build_markov_chain: singular step covariance at state " +
                         std::to_string(i));
    Eigen::SelfAdjointEigenSolver<Mat> es(moments[i].cov, Eigen::EigenvaluesOnly);
    euclid_radius =
        std::max(euclid_radius, trunc_mahalanobis * std::sqrt(es.eigenvalues().maxCoeff()));
  }

  const PointGrid grid(states.points, euclid_radius);

  std::vector<std::vector<std::pair<int, double>>> rows(n);
  std::vector<std::exception_ptr> errors(n);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    std::vector<int> candidates;
    for (std::size_t row = begin; row < end; ++row) {
      try {
        const Index i = static_cast<Index>(row);
        const Vec xi = states.points.row(i).transpose();
        const Vec& mu = moments[i].mean;
        grid.query_box(mu[0] - euclid_radius, mu[1] - euclid_radius, mu[0] + euclid_radius,
                       mu[1] + euclid_radius, candidates);

        auto& entries = rows[row];
        bool self_seen = false;
        for (int m : candidates) {
          const Vec xm = states.points.row(m).transpose();
          const Vec diff = xm - mu;
          const double d2 = diff.dot(chol[i].solve(diff));
          if (d2 > r2_max) continue;
          if (m != i && env.segment_blocked(xi, xm)) continue;
          entries.emplace_back(m, std::exp(-0.5 * d2));
          if (m == static_cast<int>(i)) self_seen = true;
        }
        if (!self_seen) {
          const Vec diff = xi - mu;
          const double d2 = diff.dot(chol[i].solve(diff));
          entries.emplace_back(static_cast<int>(i), std::exp(-0.5 * d2));
        }

        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        CompensatedSum total;
        for (const auto& [m, w] : entries) total.add(w);
        const double norm = total.value();
        if (!(norm > 0.0)) {
          // All weights underflowed; keep the state absorbing.
          entries.clear();
          entries.emplace_back(static_cast<int>(i), 1.0);
        } else {
          for (auto& [m, w] : entries) w /= norm;
        }
      } catch (...) {
        errors[row] = std::current_exception();
      }
    }
  });

  for (Index i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  std::vector<Triplet> triplets;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  triplets.reserve(nnz);
  for (Index i = 0; i < n; ++i)
    for (const auto& [m, w] : rows[i]) triplets.emplace_back(static_cast<int>(i), m, w);

  MarkovChain chain;
  chain.states = states;
  chain.h = h;
  chain.P.resize(n, n);
  chain.P.setFromTriplets(triplets.begin(), triplets.end());
  chain.P.makeCompressed();
  return chain;
}

SpMat transition_operator(const MarkovChain& chain) {
  SpMat T = SpMat(chain.P.transpose());
  T.makeCompressed();
  return T;
}

} // namespace msirl
