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

#include <cstdlib>

#include "doctest.h"
#include "msirl/io.hpp"
#include "test_helpers.hpp"

using namespace msirl;

TEST_CASE("format_double emits shortest round-trip decimals") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(0.0) == "0");
  CHECK(io::format_double(-2.5) == "-2.5");
  CHECK(io::format_double(1e22) == "1e+22");

  Rng rng(101);
  for (int k = 0; k < 200; ++k) {
    const double x = standard_normal(rng) * std::exp(10.0 * (uniform01(rng) - 0.5));
    const std::string text = io::format_double(x);
    CHECK(std::strtod(text.c_str(), nullptr) == x);
  }
  CHECK(std::strtod(io::format_double(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
  CHECK(std::strtod(io::format_double(5e-324).c_str(), nullptr) == 5e-324);
}

TEST_CASE("read_file reports missing paths") {
  CHECK_THROWS_AS(io::read_file("/nonexistent/msirl/nothing.txt"), IoError);
  const std::string dir = test::scratch_dir("io_file");
  io::write_file(dir + "/x.txt", "payload");
  CHECK(io::read_file(dir + "/x.txt") == "payload");
}

TEST_CASE("environment JSON round-trips bitwise") {
  const Environment env = test::two_room_env();
  const std::string dir = test::scratch_dir("io_env");
  io::write_environment(dir + "/environment.json", env);

  const Environment back = io::read_environment(dir + "/environment.json");
  CHECK(back.bounds.xmin == env.bounds.xmin);
  CHECK(back.bounds.ymax == env.bounds.ymax);
  REQUIRE(back.walls.size() == env.walls.size());
  for (std::size_t i = 0; i < env.walls.size(); ++i) {
    CHECK(back.walls[i].x1 == env.walls[i].x1);
    CHECK(back.walls[i].y1 == env.walls[i].y1);
    CHECK(back.walls[i].x2 == env.walls[i].x2);
    CHECK(back.walls[i].y2 == env.walls[i].y2);
  }
  REQUIRE(back.rooms.size() == env.rooms.size());
  for (std::size_t i = 0; i < env.rooms.size(); ++i) {
    CHECK(back.rooms[i].rect.xmin == env.rooms[i].rect.xmin);
    CHECK(back.rooms[i].rect.xmax == env.rooms[i].rect.xmax);
    CHECK(back.rooms[i].group == env.rooms[i].group);
  }

  // Rewriting the read-back environment reproduces the file byte for byte.
  io::write_environment(dir + "/environment2.json", back);
  CHECK(io::read_file(dir + "/environment.json") == io::read_file(dir + "/environment2.json"));

  io::write_file(dir + "/broken.json", "{\"schema\": \"msirl.environment.v2\"}");
  CHECK_THROWS_AS(io::read_environment(dir + "/broken.json"), IoError);
  io::write_file(dir + "/garbage.json", "not json at all");
  CHECK_THROWS_AS(io::read_environment(dir + "/garbage.json"), IoError);
}

TEST_CASE("state sets and sparse matrices round-trip bitwise") {
  const MarkovChain chain = test::two_room_chain(10, 7);
  const std::string dir = test::scratch_dir("io_states");

  io::write_states(dir + "/states.csv", chain.states);
  const std::string text = io::read_file(dir + "/states.csv");
  CHECK(text.rfind("# schema: msirl.states.v1\nindex,x,y,room\n", 0) == 0);

  const StateSet back = io::read_states(dir + "/states.csv");
  REQUIRE(back.size() == chain.states.size());
  CHECK((back.points.array() == chain.states.points.array()).all());
  CHECK(back.room == chain.states.room);

  io::write_sparse(dir + "/chain.csv", "chain", chain.P);
  const SpMatRow P = io::read_sparse(dir + "/chain.csv", "chain", chain.size(), chain.size());
  CHECK((test::dense(P).array() == test::dense(chain.P).array()).all());

  CHECK_THROWS_AS(io::read_sparse(dir + "/chain.csv", "policy", chain.size(), chain.size()),
                  IoError);
  CHECK_THROWS_AS(io::read_sparse(dir + "/chain.csv", "chain", 2, 2), IoError);
}

TEST_CASE("chains, costs, and forward solutions round-trip") {
  const MarkovChain chain = test::two_room_chain(9, 5);
  const Vec q = test::goal_cost(chain.states, 0);
  const ForwardSolution sol = solve_linear_bellman(chain, q);
  const std::string dir = test::scratch_dir("io_chain");

  io::write_chain(dir, chain);
  const MarkovChain chain2 = io::read_chain(dir);
  CHECK(chain2.h == chain.h);
  CHECK((chain2.states.points.array() == chain.states.points.array()).all());
  CHECK((test::dense(chain2.P).array() == test::dense(chain.P).array()).all());

  io::write_cost(dir + "/cost.csv", q);
  const Vec q2 = io::read_cost(dir + "/cost.csv");
  CHECK((q2.array() == q.array()).all());

  io::write_forward(dir, sol);
  const ForwardSolution sol2 = io::read_forward(dir, chain.size());
  CHECK((sol2.z.array() == sol.z.array()).all());
  CHECK((sol2.v.array() == sol.v.array()).all());
  CHECK(sol2.c == sol.c);
  CHECK((test::dense(sol2.policy).array() == test::dense(sol.policy).array()).all());

  CHECK_THROWS_AS(io::read_forward(dir, chain.size() + 1), IoError);
  CHECK_THROWS_AS(io::read_chain(dir + "/missing"), IoError);
}

TEST_CASE("demonstrations round-trip counts and transition logs") {
  const MarkovChain chain = test::two_room_chain(8, 3);
  const Vec q = test::goal_cost(chain.states, 0);
  const ForwardSolution sol = solve_linear_bellman(chain, q);
  const Demonstrations sampled = make_demonstrations_sampled(sol, 500, 42);
  const std::string dir = test::scratch_dir("io_demos");

  io::write_demos(dir, sampled);
  const Demonstrations back = io::read_demos(dir, chain.size());
  CHECK((back.a.array() == sampled.a.array()).all());
  CHECK((back.b.array() == sampled.b.array()).all());
  CHECK(back.transitions == sampled.transitions);

  CHECK_THROWS_AS(io::read_demos(dir, chain.size() - 1), IoError);

  // Exact demonstrations have no transition log; the CSV is just headers.
  const Demonstrations exact = make_demonstrations_exact(sol, 100.0);
  io::write_demos(dir, exact);
  CHECK(io::read_demos(dir, chain.size()).transitions.empty());
}

TEST_CASE("wavelet trees round-trip structure and values") {
  const MarkovChain chain = test::two_room_chain(10, 7);
  const WaveletTree tree = build_tree(transition_operator(chain), 1e-6, 6);
  const std::string dir = test::scratch_dir("io_tree");

  io::write_tree(dir, tree);
  const WaveletTree back = io::read_tree(dir);
  CHECK(back.epsilon == tree.epsilon);
  REQUIRE(back.dims == tree.dims);
  REQUIRE(back.levels.size() == tree.levels.size());
  for (std::size_t j = 0; j < tree.levels.size(); ++j) {
    CHECK((test::dense(back.levels[j].scaling).array() ==
           test::dense(tree.levels[j].scaling).array())
              .all());
    CHECK((test::dense(back.levels[j].wavelet).array() ==
           test::dense(tree.levels[j].wavelet).array())
              .all());
    CHECK((test::dense(back.levels[j].op).array() == test::dense(tree.levels[j].op).array())
              .all());
  }
}

TEST_CASE("IRL solutions write CSV plus JSON and read back") {
  const MarkovChain chain = test::two_room_chain(8, 3);
  const Vec q = test::goal_cost(chain.states, 0);
  const ForwardSolution forward = solve_linear_bellman(chain, q);
  const Demonstrations demos = make_demonstrations_exact(forward, 50.0);
  const Mat phi = Mat::Identity(chain.size(), chain.size());
  const IrlProblem problem(chain, demos, phi);
  IrlSolution sol = newton_solve(problem, Vec::Zero(chain.size()));
  finalize_solution(problem, sol);

  const std::string dir = test::scratch_dir("io_irl");
  io::write_irl_solution(dir, "level_0", sol, 0.125);

  const auto [v_hat, q_hat] = io::read_irl_solution_csv(dir + "/irl_level_0.csv");
  CHECK((v_hat.array() == sol.v_hat.array()).all());
  CHECK((q_hat.array() == sol.q_hat.array()).all());
  CHECK(io::read_file(dir + "/irl_level_0.json").find("\"msirl.irl.v1\"") != std::string::npos);
  CHECK_THROWS_AS(io::read_irl_solution_csv(dir + "/irl_missing.csv"), IoError);
}

TEST_CASE("levels table round-trips all columns") {
  std::vector<io::LevelRow> rows;
  rows.push_back({3, 4, 7, -12.5, 0.5});
  rows.push_back({2, 9, 3, -13.75, 0.25});
  rows.push_back({0, 30, 2, -14.0, 0.1});

  const std::string dir = test::scratch_dir("io_levels");
  io::write_levels_table(dir + "/levels.csv", rows);
  const std::string text = io::read_file(dir + "/levels.csv");
  CHECK(text.rfind("# schema: msirl.levels.v1\nlevel,n_features,iterations,nll,rms_error\n", 0) ==
        0);

  const auto back = io::read_levels_table(dir + "/levels.csv");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].level == rows[i].level);
    CHECK(back[i].n_features == rows[i].n_features);
    CHECK(back[i].iterations == rows[i].iterations);
    CHECK(back[i].nll == rows[i].nll);
    CHECK(back[i].rms_error == rows[i].rms_error);
  }
}

TEST_CASE("grid and trajectory artifacts declare schemas and validate sizes") {
  const MarkovChain chain = test::two_room_chain(6, 2);
  const std::string dir = test::scratch_dir("io_grid");

  io::write_grid(dir + "/grid.csv", chain.states, Vec::Ones(chain.size()));
  CHECK(io::read_file(dir + "/grid.csv").rfind("# schema: msirl.grid.v1\nx,y,value\n", 0) == 0);
  CHECK_THROWS_AS(io::write_grid(dir + "/bad.csv", chain.states, Vec::Ones(2)), ConfigError);

  ClosedLoopResult result;
  result.t = {0.0, 0.1, 0.2};
  result.states = Mat::Zero(3, 2);
  result.states << 0.0, 0.0, 0.1, 0.0, 0.2, 0.0;
  result.controls = Mat::Ones(3, 2);
  result.collisions = 1;
  io::write_trajectory(dir, result, 9, make_rhc_config(0.1, 3));
  CHECK(io::read_file(dir + "/trajectory.csv")
            .rfind("# schema: msirl.trajectory.v1\nt,x,y,u1,u2\n", 0) == 0);
  CHECK(io::read_file(dir + "/control.json").find("\"msirl.control.v1\"") != std::string::npos);
}

TEST_CASE("value heatmaps render as P2 images") {
  const Environment env = test::two_room_env();
  const MarkovChain chain = test::two_room_chain(6, 2);
  const std::string dir = test::scratch_dir("io_pgm");

  Vec values(chain.size());
  for (Index i = 0; i < chain.size(); ++i) values[i] = chain.states.points(i, 0);
  io::write_heatmap_pgm(dir + "/v.pgm", env, chain.states, values, 40);

  const std::string text = io::read_file(dir + "/v.pgm");
  CHECK(text.rfind("P2\n# schema: msirl.heatmap.v1\n", 0) == 0);
  CHECK(text.find("255") != std::string::npos);

  // A constant field renders monochrome (all samples map to gray level 0).
  io::write_heatmap_pgm(dir + "/flat.pgm", env, chain.states, Vec::Ones(chain.size()), 12);
  const std::string flat = io::read_file(dir + "/flat.pgm");
  const std::size_t header_end = flat.find("255\n");
  REQUIRE(header_end != std::string::npos);
  for (std::size_t pos = header_end + 4; pos < flat.size(); ++pos) {
    CHECK((flat[pos] == '0' || flat[pos] == ' ' || flat[pos] == '\n'));
  }

  CHECK_THROWS_AS(io::write_heatmap_pgm(dir + "/bad.pgm", env, chain.states, Vec::Ones(1)),
                  ConfigError);
}
