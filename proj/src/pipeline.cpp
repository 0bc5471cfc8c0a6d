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

#include "msirl/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

namespace msirl::pipeline {

Environment load_environment(const ExperimentConfig& cfg) {
  if (!cfg.env_path.empty()) return io::read_environment(cfg.env_path);
  return build_fractal_environment(cfg.env_spec);
}

Vec make_cost(const CostConfig& cost, const Environment& env, const StateSet& states) {
  const Index n = states.size();
  Vec q(n);
  if (cost.type == "uniform") {
    q.setConstant(cost.low);
    return q;
  }
  if (cost.room < 0 || cost.room >= static_cast<int>(env.rooms.size())) {
    throw ConfigError("cost.room " + std::to_string(cost.room) + " is out of range for " +
                      std::to_string(env.rooms.size()) + " rooms");
  }
  if (cost.type == "goal_room") {
    for (Index i = 0; i < n; ++i) {
      q[i] = states.room[static_cast<std::size_t>(i)] == cost.room ? cost.low : cost.high;
    }
    return q;
  }
  if (cost.type == "quadratic") {
    const Rect& goal = env.rooms[static_cast<std::size_t>(cost.room)].rect;
    for (Index i = 0; i < n; ++i) {
      const double dx = states.points(i, 0) - goal.cx();
      const double dy = states.points(i, 1) - goal.cy();
      q[i] = cost.weight * (dx * dx + dy * dy);
    }
    return q;
  }
  throw ConfigError("unknown cost type: " + cost.type);
}

void stage_discretize(const ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  io::ensure_dir(out_dir);
  const Environment env = load_environment(cfg);
  const StateSet states = sample_states(env, cfg.sampling.per_room, cfg.sampling.seed);
  const ContinuousDynamics dyn = dynamics_by_name(cfg.dynamics.name, 2, cfg.dynamics.sigma);
  const MarkovChain chain =
      build_markov_chain(dyn, states, env, cfg.dynamics.h, cfg.truncation.trunc_mahalanobis);
  const Vec q = make_cost(cfg.cost, env, states);

  io::write_environment(out_dir + "/environment.json", env);
  io::write_chain(out_dir, chain);
  io::write_cost(out_dir + "/cost.csv", q);
}

void stage_forward(const ExperimentConfig& cfg, const std::string& in_dir,
                   const std::string& out_dir) {
  cfg.validate();
  io::ensure_dir(out_dir);
  const MarkovChain chain = io::read_chain(in_dir);
  const Vec q = io::read_cost(in_dir + "/cost.csv");
  if (q.size() != chain.size()) throw IoError(in_dir + "/cost.csv: wrong number of rows");

  const ForwardSolution solution =
      solve_linear_bellman(chain, q, cfg.forward.tol, cfg.forward.max_iter);
  const Demonstrations demos =
      cfg.demos.mode == "exact"
          ? make_demonstrations_exact(solution, cfg.demos.scale)
          : make_demonstrations_sampled(solution, static_cast<int>(cfg.demos.n_transitions),
                                        cfg.demos.seed);
  io::write_forward(out_dir, solution);
  io::write_demos(out_dir, demos);
}

void stage_wavelets(const ExperimentConfig& cfg, const std::string& in_dir,
                    const std::string& out_dir) {
  cfg.validate();
  io::ensure_dir(out_dir);
  const MarkovChain chain = io::read_chain(in_dir);
  const SpMat T = transition_operator(chain);
  const WaveletTree tree = build_tree(T, cfg.wavelets.epsilon, cfg.wavelets.max_levels);
  io::write_tree(out_dir + "/tree", tree);
}

void stage_irl(const ExperimentConfig& cfg, const std::string& in_dir,
               const std::string& out_dir) {
  cfg.validate();
  io::ensure_dir(out_dir);
  const MarkovChain chain = io::read_chain(in_dir);
  const Demonstrations demos = io::read_demos(in_dir, chain.size());
  const WaveletTree tree = io::read_tree(in_dir + "/tree");
  const ForwardSolution truth = io::read_forward(in_dir, chain.size());

  const int start = cfg.irl.start_level == 0 ? tree.n_levels() : cfg.irl.start_level;
  const int end = cfg.irl.end_level;
  const HierarchyResult result =
      hierarchical_solve(chain, demos, tree, start, end, cfg.irl.tol, cfg.irl.max_iter);

  std::vector<io::LevelRow> table;
  for (const IrlSolution& solution : result.solutions) {
    const int level = solution.diagnostics.level;
    const double rms = rms_error(solution.v_hat, truth.v);
    const std::string tag = "level_" + std::to_string(level);
    io::write_irl_solution(out_dir, tag, solution, rms);
    io::write_grid(out_dir + "/v_level_" + std::to_string(level) + ".csv", chain.states,
                   solution.v_hat);
    io::write_grid(out_dir + "/q_level_" + std::to_string(level) + ".csv", chain.states,
                   solution.q_hat);
    // Equal feature counts at consecutive levels mean a square orthonormal
    // inter-level factor: the span is unchanged and the cascade re-accepts the
    // warm start, so the finer duplicate adds no data point to the table.
    if (table.empty() || table.back().n_features != solution.diagnostics.n_features) {
      table.push_back({level, solution.diagnostics.n_features, solution.diagnostics.iterations,
                       solution.diagnostics.nll, rms});
    }
  }
  io::write_levels_table(out_dir + "/levels.csv", table);
  if (!result.completed) {
    throw ConvergenceError("irl stage: " + result.error, 0,
                           std::numeric_limits<double>::quiet_NaN());
  }

  const IrlSolution* finest = &result.solutions.back();
  IrlSolution augmented;
  if (cfg.irl.augment_k != 0) {
    const Index all = tree.dims[0] - tree.dims[static_cast<std::size_t>(end)];
    const int k = cfg.irl.augment_k == -1 ? static_cast<int>(all) : cfg.irl.augment_k;
    augmented = augment_and_solve(chain, demos, tree, end, k, &finest->w, cfg.irl.tol,
                                  cfg.irl.max_iter);
    const double rms = rms_error(augmented.v_hat, truth.v);
    io::write_irl_solution(out_dir, "augmented", augmented, rms);
    io::write_grid(out_dir + "/v_augmented.csv", chain.states, augmented.v_hat);
    io::write_grid(out_dir + "/q_augmented.csv", chain.states, augmented.q_hat);
    finest = &augmented;
  }
  io::write_sparse(out_dir + "/irl_policy.csv", "policy", finest->policy_hat);
}

void stage_control(const ExperimentConfig& cfg, const std::string& in_dir,
                   const std::string& out_dir) {
  cfg.validate();
  io::ensure_dir(out_dir);
  const MarkovChain chain = io::read_chain(in_dir);
  const Environment env = io::read_environment(in_dir + "/environment.json");
  const SpMatRow policy_hat =
      io::read_sparse(in_dir + "/irl_policy.csv", "policy", chain.size(), chain.size());
  const ContinuousDynamics dyn = dynamics_by_name(cfg.dynamics.name, 2, cfg.dynamics.sigma);
  const RhcConfig rhc = make_rhc_config(chain.h, cfg.control.k_rhc);

  Vec x0(2);
  if (cfg.control.has_x0) {
    x0 << cfg.control.x0_x, cfg.control.x0_y;
  } else {
    if (env.rooms.empty()) {
      throw ConfigError("control.x0 is required when the environment has no rooms");
    }
    x0 << env.rooms.back().rect.cx(), env.rooms.back().rect.cy();
  }

  const ClosedLoopResult result = run_closed_loop(dyn, chain, policy_hat, env, x0, rhc,
                                                  cfg.control.t_end, cfg.control.dt,
                                                  cfg.control.seed);
  io::write_trajectory(out_dir, result, cfg.control.seed, rhc);
}

void run_pipeline(const ExperimentConfig& cfg,
                  const std::function<void(const std::string&)>& on_stage) {
  cfg.validate();
  io::ensure_dir(cfg.output_dir);
  save_config(cfg.output_dir + "/config.json", cfg);
  const std::string& dir = cfg.output_dir;

  const auto announce = [&on_stage](const std::string& name) {
    if (on_stage) on_stage(name);
  };
  announce("discretize");
  stage_discretize(cfg, dir);
  announce("forward");
  stage_forward(cfg, dir, dir);
  announce("wavelets");
  stage_wavelets(cfg, dir, dir);
  announce("irl");
  stage_irl(cfg, dir, dir);
  announce("control");
  stage_control(cfg, dir, dir);
}

void write_report(const std::string& in_dir, std::ostream& out) {
  const auto rows = io::read_levels_table(in_dir + "/levels.csv");
  out << "level  n_features  iterations  nll              rms_error\n";
  for (const auto& row : rows) {
    out << row.level << "      " << row.n_features << "          " << row.iterations << "       "
        << io::format_double(row.nll) << "  " << io::format_double(row.rms_error) << "\n";
  }

  std::string finest = in_dir + "/irl_augmented.csv";
  if (!std::filesystem::exists(finest)) {
    int best_level = -1;
    for (const auto& row : rows) {
      if (best_level < 0 || row.level < best_level) best_level = row.level;
    }
    if (best_level < 0) throw IoError(in_dir + ": no solution levels found in levels.csv");
    finest = in_dir + "/irl_level_" + std::to_string(best_level) + ".csv";
  }

  const Environment env = io::read_environment(in_dir + "/environment.json");
  const StateSet states = io::read_states(in_dir + "/states.csv");
  const auto [v_hat, q_hat] = io::read_irl_solution_csv(finest);
  io::write_heatmap_pgm(in_dir + "/v_hat.pgm", env, states, v_hat);
  io::write_heatmap_pgm(in_dir + "/q_hat.pgm", env, states, q_hat);
  out << "rendered " << in_dir << "/v_hat.pgm and " << in_dir << "/q_hat.pgm from " << finest
      << "\n";
}

} // namespace msirl::pipeline
