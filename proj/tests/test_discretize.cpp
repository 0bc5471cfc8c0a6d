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

#include <cmath>

#include "doctest.h"
#include "msirl/discretize.hpp"
#include "test_helpers.hpp"

using namespace msirl;

namespace {

Environment one_room_env() {
  FractalRoomSpec spec;
  spec.groups = 1;
  spec.rooms_per_group = 1;
  return build_fractal_environment(spec);
}

StateSet hand_states(std::initializer_list<std::pair<double, double>> pts,
                     const Environment& env) {
  StateSet states;
  states.points = Mat(static_cast<Index>(pts.size()), 2);
  Index i = 0;
  for (const auto& [x, y] : pts) {
    states.points(i, 0) = x;
    states.points(i, 1) = y;
    states.room.push_back(env.room_of(x, y));
    ++i;
  }
  return states;
}

} // namespace

TEST_CASE("sample_states draws the requested points inside their rooms, deterministically") {
  const Environment env = test::two_room_env();
  const StateSet s1 = sample_states(env, 10, 7);
  const StateSet s2 = sample_states(env, 10, 7);
  const StateSet s3 = sample_states(env, 10, 8);

  REQUIRE(s1.size() == 20);
  for (Index i = 0; i < s1.size(); ++i) {
    const int room = s1.room[static_cast<std::size_t>(i)];
    REQUIRE(room >= 0);
    CHECK(env.rooms[static_cast<std::size_t>(room)].rect.contains(s1.points(i, 0),
                                                                  s1.points(i, 1)));
    CHECK(env.room_of(s1.points(i, 0), s1.points(i, 1)) == room);
  }

  CHECK((s1.points.array() == s2.points.array()).all());
  CHECK_FALSE((s1.points.array() == s3.points.array()).all());

  // Room-major layout: first per_room states belong to room 0.
  for (Index i = 0; i < 10; ++i) CHECK(s1.room[static_cast<std::size_t>(i)] == 0);
  for (Index i = 10; i < 20; ++i) CHECK(s1.room[static_cast<std::size_t>(i)] == 1);
}

TEST_CASE("sample_states rejects degenerate requests") {
  const Environment env = test::two_room_env();
  CHECK_THROWS_AS(sample_states(env, 0, 1), ConfigError);
  CHECK_THROWS_AS(sample_states(Environment{}, 5, 1), ConfigError);
}

TEST_CASE("transition rows are stochastic, nonnegative, and keep the self entry") {
  const MarkovChain chain = test::two_room_chain(15, 1);
  const Index n = chain.size();
  REQUIRE(n == 30);
  CHECK(chain.h == 0.1);

  for (Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    bool has_self = false;
    for (SpMatRow::InnerIterator it(chain.P, i); it; ++it) {
      CHECK(it.value() > 0.0);
      row_sum += it.value();
      if (it.col() == i) has_self = true;
    }
    CHECK(std::abs(row_sum - 1.0) <= 1e-12);
    CHECK(has_self);
  }
}

TEST_CASE("no stored transition crosses a wall") {
  const MarkovChain chain = test::two_room_chain(15, 2);
  const Environment env = test::two_room_env();
  for (Index i = 0; i < chain.size(); ++i) {
    const Vec src = chain.states.points.row(i).transpose();
    for (SpMatRow::InnerIterator it(chain.P, i); it; ++it) {
      const Vec dst = chain.states.points.row(it.col()).transpose();
      CHECK_FALSE(env.segment_blocked(src, dst));
    }
  }
}

TEST_CASE("a doorless wall splits the chain into absorbing halves") {
  // Hand-built two-cell world with a full dividing wall: the only lawful
  // transitions are self loops.
  Environment env;
  env.bounds = Rect{0.0, 0.0, 2.0, 1.0};
  env.rooms.push_back({Rect{0.0, 0.0, 1.0, 1.0}, 0});
  env.rooms.push_back({Rect{1.0, 0.0, 2.0, 1.0}, 0});
  env.walls.push_back({0.0, 0.0, 2.0, 0.0});
  env.walls.push_back({0.0, 1.0, 2.0, 1.0});
  env.walls.push_back({0.0, 0.0, 0.0, 1.0});
  env.walls.push_back({2.0, 0.0, 2.0, 1.0});
  env.walls.push_back({1.0, 0.0, 1.0, 1.0}); // full divider

  const StateSet states = hand_states({{0.5, 0.5}, {1.5, 0.5}}, env);
  const ContinuousDynamics dyn = make_single_integrator(2, 1.0);
  const MarkovChain chain = build_markov_chain(dyn, states, env, 0.1, 3.0);

  CHECK(test::dense(chain.P).isIdentity(0.0));
}

TEST_CASE("tiny truncation keeps only the self transition") {
  const Environment env = one_room_env();
  const StateSet states = hand_states({{-0.25, 0.0}, {0.25, 0.0}}, env);
  const ContinuousDynamics dyn = make_single_integrator(2, 1.0);
  const MarkovChain chain = build_markov_chain(dyn, states, env, 0.1, 0.01);
  CHECK(test::dense(chain.P).isIdentity(0.0));
}

TEST_CASE("mirror-symmetric states get mirror-symmetric rows") {
  const Environment env = one_room_env();
  const ContinuousDynamics dyn = make_single_integrator(2, 1.0);

  const StateSet apart = hand_states({{-0.1, 0.0}, {0.1, 0.0}}, env);
  const Mat P = test::dense(build_markov_chain(dyn, apart, env, 0.1, 3.0).P);
  CHECK(P(0, 0) == doctest::Approx(P(1, 1)).epsilon(1e-14));
  CHECK(P(0, 1) == doctest::Approx(P(1, 0)).epsilon(1e-14));
  CHECK(P(0, 0) > P(0, 1)); // the step kernel peaks at the source

  // As the pair collapses the rows approach the symmetric limit [0.5, 0.5].
  const StateSet close = hand_states({{-5e-9, 0.0}, {5e-9, 0.0}}, env);
  const Mat Q = test::dense(build_markov_chain(dyn, close, env, 0.1, 3.0).P);
  CHECK(Q(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(Q(0, 1) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("permuting the state order permutes the chain within 1e-14") {
  const Environment env = test::two_room_env();
  const StateSet states = sample_states(env, 12, 5);
  const Index n = states.size();

  StateSet reversed;
  reversed.points = Mat(n, 2);
  reversed.room.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    reversed.points.row(n - 1 - i) = states.points.row(i);
    reversed.room[static_cast<std::size_t>(n - 1 - i)] = states.room[static_cast<std::size_t>(i)];
  }

  const ContinuousDynamics dyn = make_single_integrator(2, 1.0);
  const Mat P = test::dense(build_markov_chain(dyn, states, env, 0.1, 3.0).P);
  const Mat Pr = test::dense(build_markov_chain(dyn, reversed, env, 0.1, 3.0).P);

  double max_diff = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      max_diff = std::max(max_diff, std::abs(P(i, j) - Pr(n - 1 - i, n - 1 - j)));
  CHECK(max_diff <= 1e-14);
}

TEST_CASE("truncation radius controls row support") {
  const Environment env = test::two_room_env();
  const StateSet states = sample_states(env, 15, 3);
  const ContinuousDynamics dyn = make_single_integrator(2, 1.0);

  const MarkovChain wide = build_markov_chain(dyn, states, env, 0.1, 3.0);
  const MarkovChain tight = build_markov_chain(dyn, states, env, 0.1, 1.0);
  CHECK(tight.P.nonZeros() < wide.P.nonZeros());
  CHECK(wide.P.nonZeros() < states.size() * states.size()); // truncation bites
}

TEST_CASE("transition_operator is the column-stochastic transpose") {
  const MarkovChain chain = test::two_room_chain(10, 4);
  const SpMat T = transition_operator(chain);

  REQUIRE(T.rows() == chain.size());
  const Mat Td = test::dense(T);
  const Mat Pd = test::dense(chain.P);
  CHECK((Td - Pd.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
  for (Index j = 0; j < T.cols(); ++j) CHECK(std::abs(Td.col(j).sum() - 1.0) <= 1e-12);
}

TEST_CASE("chain construction rejects invalid parameters") {
  const Environment env = one_room_env();
  const StateSet states = hand_states({{0.0, 0.0}}, env);
  const ContinuousDynamics dyn = make_single_integrator(2, 1.0);
  CHECK_THROWS_AS(build_markov_chain(dyn, states, env, 0.0, 3.0), ConfigError);
  CHECK_THROWS_AS(build_markov_chain(dyn, states, env, 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(build_markov_chain(dyn, StateSet{}, env, 0.1, 3.0), ConfigError);
  CHECK_THROWS_AS(build_markov_chain(make_single_integrator(3, 1.0), states, env, 0.1, 3.0),
                  ConfigError);
}
