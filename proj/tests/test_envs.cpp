// Copyright 2026 The qevo Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qevo/envs/cartpole.hpp"
#include "qevo/envs/minigrid.hpp"

namespace {

using namespace qevo::envs;

TEST(CartPole, ResetIsSeededAndBounded) {
  CartPole a, b;
  qevo::Rng ra(42), rb(42);
  EXPECT_EQ(a.reset(ra), b.reset(rb));
  qevo::Rng rng(1);
  CartPole env;
  for (int i = 0; i < 1000; ++i) {
    const auto obs = env.reset(rng);
    ASSERT_EQ(obs.size(), 4u);
    for (double v : obs) {
      EXPECT_GE(v, -0.05);
      EXPECT_LE(v, 0.05);
    }
    const auto& s = env.state();
    EXPECT_EQ(obs, (std::vector<double>{s.x, s.x_dot, s.theta, s.theta_dot}));
    EXPECT_EQ(s.steps, 0);
  }
}

TEST(CartPole, OneStepFromRestMatchesHandIntegration) {
  CartPole env;
  env.set_state({});
  const auto tr = env.step(1);
  // Hand evaluation with g=9.8, mc=1, mp=0.1, l=0.5, F=10, tau=0.02:
  // x_acc = 400/41, theta_acc = -600/41, then velocity-first Euler.
  EXPECT_NEAR(env.state().x_dot, 8.0 / 41.0, 1e-12);
  EXPECT_NEAR(env.state().x, 0.02 * 8.0 / 41.0, 1e-12);
  EXPECT_NEAR(env.state().theta_dot, -12.0 / 41.0, 1e-12);
  EXPECT_NEAR(env.state().theta, -0.02 * 12.0 / 41.0, 1e-12);
  EXPECT_EQ(tr.reward, 1.0);
  EXPECT_FALSE(tr.done);
}

TEST(CartPole, TerminatesPastTrackLimit) {
  CartPole env;
  CartPoleState s;
  s.x = 2.39;
  s.x_dot = 1.0;  // moves 0.02 in one step -> 2.41
  env.set_state(s);
  const auto tr = env.step(1);
  EXPECT_GT(env.state().x, 2.4);
  EXPECT_TRUE(tr.done);
  EXPECT_EQ(tr.reward, 1.0);
  EXPECT_THROW(env.step(0), qevo::UsageError);
}

TEST(CartPole, TerminatesPastFifteenDegrees) {
  CartPole env;
  CartPoleState s;
  s.theta = 14.9 * std::numbers::pi / 180.0;
  s.theta_dot = 1.0;
  env.set_state(s);
  EXPECT_TRUE(env.step(1).done);

  CartPoleParams twelve;
  twelve.theta_threshold_deg = 12.0;
  CartPole strict(twelve);
  CartPoleState s2;
  s2.theta = 13.0 * std::numbers::pi / 180.0;
  strict.set_state(s2);
  EXPECT_TRUE(strict.step(1).done);
}

TEST(CartPole, StepLimitIsFiveHundred) {
  // Without gravity or push force the system stays at rest forever.
  CartPoleParams p;
  p.gravity = 0.0;
  p.force_mag = 0.0;
  CartPole env(p);
  env.set_state({});
  double total = 0.0;
  int steps = 0;
  bool done = false;
  while (!done) {
    const auto tr = env.step(steps % 2);
    total += tr.reward;
    done = tr.done;
    ++steps;
  }
  EXPECT_EQ(steps, 500);
  EXPECT_EQ(total, 500.0);
}

TEST(CartPole, BadAction) {
  CartPole env;
  qevo::Rng rng(0);
  env.reset(rng);
  EXPECT_THROW(env.step(2), qevo::UsageError);
}

TEST(CartPole, StepBeforeResetIsAnError) {
  CartPole env;
  EXPECT_THROW(env.step(0), qevo::UsageError);
}

double play(MiniGrid& env, const std::vector<int>& actions) {
  double total = 0.0;
  for (int a : actions) total += env.step(a).reward;
  return total;
}

TEST(MiniGrid, ResetGeometry) {
  MiniGrid env(5);
  const auto& s = env.state();
  EXPECT_EQ(s.agent_pos, (GridPos{1, 1}));
  EXPECT_EQ(s.agent_dir, Direction::Right);
  EXPECT_EQ(s.goal_pos, (GridPos{3, 3}));
  EXPECT_EQ(s.max_steps(), 100);
  EXPECT_EQ(env.reset().size(), 147u);
  MiniGrid other(5);
  EXPECT_EQ(env.reset(), other.reset());
  EXPECT_THROW(MiniGrid(7), qevo::ConfigError);
}

TEST(MiniGrid, BfsShortestPaths) {
  EXPECT_EQ(qevo::testing::bfs_shortest_path(5), 5);
  EXPECT_EQ(qevo::testing::bfs_shortest_path(6), 7);
  EXPECT_EQ(qevo::testing::bfs_shortest_path(8), 11);
}

std::vector<int> optimal_path(int n) {
  // Straight along the top row, turn right, straight down.
  std::vector<int> a(static_cast<std::size_t>(n - 3), 2);
  a.push_back(1);
  a.insert(a.end(), static_cast<std::size_t>(n - 3), 2);
  return a;
}

TEST(MiniGrid, OptimalRewards) {
  struct Case {
    int n;
    double want;
  };
  for (auto [n, want] : {Case{5, 0.955}, Case{6, 0.95625}, Case{8, 1.0 - 0.9 * 11.0 / 256.0}}) {
    MiniGrid env(n);
    const auto path = optimal_path(n);
    EXPECT_EQ(static_cast<int>(path.size()), qevo::testing::bfs_shortest_path(n));
    EXPECT_NEAR(play(env, path), want, 1e-12) << n;
    EXPECT_TRUE(env.done());
    EXPECT_THROW(env.step(0), qevo::UsageError);
  }
  EXPECT_NEAR(1.0 - 0.9 * 11.0 / 256.0, 0.9613, 1e-4);
}

TEST(MiniGrid, TimeoutGivesZero) {
  MiniGrid env(5);
  double total = 0.0;
  int steps = 0;
  while (!env.done()) {
    total += env.step(0).reward;
    ++steps;
  }
  EXPECT_EQ(steps, 100);
  EXPECT_EQ(total, 0.0);
}

TEST(MiniGrid, WallsAndRotations) {
  MiniGrid env(5);
  env.step(0);  // face up, wall ahead
  const auto pos = env.state().agent_pos;
  env.step(2);
  EXPECT_EQ(env.state().agent_pos, pos);
  for (int i = 0; i < 3; ++i) env.step(0);
  EXPECT_EQ(env.state().agent_dir, Direction::Right);  // four lefts
  const auto before = env.state();
  for (int a : {3, 4, 5}) EXPECT_EQ(env.step(a).reward, 0.0);
  EXPECT_EQ(env.state().agent_pos, before.agent_pos);
  EXPECT_EQ(env.state().agent_dir, before.agent_dir);
  EXPECT_EQ(env.state().steps, before.steps + 3);
  EXPECT_THROW(env.step(6), qevo::UsageError);
  EXPECT_THROW(env.step(-1), qevo::UsageError);
}

TEST(MiniGrid, ObservationContents) {
  using namespace minigrid_ids;
  MiniGrid env(5);
  const auto obs = env.reset();
  for (double v : obs) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  // Agent at (1,1) facing right: the goal (3,3) is two ahead, two right.
  EXPECT_DOUBLE_EQ(obs[MiniGrid::view_index(5, 4)], kGoal / kObjectScale);
  EXPECT_DOUBLE_EQ(obs[MiniGrid::view_index(5, 4) + 1], kGreen / kColorScale);
  // Cell ahead is empty floor; the agent's own cell too.
  EXPECT_DOUBLE_EQ(obs[MiniGrid::view_index(3, 5)], kEmpty / kObjectScale);
  EXPECT_DOUBLE_EQ(obs[MiniGrid::view_index(3, 6)], kEmpty / kObjectScale);
  // Far corner of the view lies outside the grid.
  EXPECT_DOUBLE_EQ(obs[MiniGrid::view_index(0, 0)], kUnseen / kObjectScale);

  // Walk to (3,1) facing right: the wall is directly ahead.
  env.step(2);
  const auto tr = env.step(2);
  EXPECT_EQ(env.state().agent_pos, (GridPos{3, 1}));
  EXPECT_DOUBLE_EQ(tr.observation[MiniGrid::view_index(3, 5)], kWall / kObjectScale);
  EXPECT_DOUBLE_EQ(tr.observation[MiniGrid::view_index(3, 5) + 1], kGrey / kColorScale);
}

TEST(MiniGrid, RotationChangesViewNotPosition) {
  MiniGrid env(6);
  const auto before = env.reset();
  const auto tr = env.step(1);
  EXPECT_NE(tr.observation, before);
  EXPECT_EQ(env.state().agent_pos, (GridPos{1, 1}));
}

TEST(MiniGrid, RewardIsZeroOrInRange) {
  // Random walks: reward is exactly 0 unless the goal is reached.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> act(0, 5);
  for (int ep = 0; ep < 200; ++ep) {
    MiniGrid env(5);
    while (!env.done()) {
      const auto tr = env.step(act(rng));
      if (env.state().agent_pos == env.state().goal_pos) {
        EXPECT_NEAR(tr.reward, 1.0 - 0.9 * env.state().steps / 100.0, 1e-12);
        EXPECT_GT(tr.reward, 0.1);
        EXPECT_LT(tr.reward, 1.0);
      } else {
        EXPECT_EQ(tr.reward, 0.0);
      }
    }
  }
}

}  // namespace
