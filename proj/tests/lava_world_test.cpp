// Copyright 2026 The FARR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "farr/lava_world.hpp"

#include <map>

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace farr {
namespace {

LavaWorldEnv default_lava() {
  return LavaWorldEnv(load_map(default_lava_map_text()));
}

TEST(LavaWorld, SpecConstants) {
  const LavaWorldEnv env = default_lava();
  EXPECT_EQ(env.spec().action_count, 4);
  EXPECT_EQ(env.spec().observation_count, 25);
  EXPECT_EQ(env.spec().horizon, 20);
  EXPECT_DOUBLE_EQ(env.spec().discount, 1.0);
  EXPECT_EQ(env.spec().theta_space.grid.size(), 24u);
  EXPECT_TRUE(env.deterministic_dynamics());
  EXPECT_DOUBLE_EQ(env.max_return(), -1.0);
  EXPECT_DOUBLE_EQ(env.min_return(), -34.0);
}

TEST(LavaWorld, StepIntoFloorIsMinusOneNonTerminal) {
  LavaWorldEnv env = default_lava();
  env.reset(GridGoal{4, 4}, 0);
  const StepResult r = env.step(3);  // Right: (0,1) -> (0,2), floor.
  EXPECT_DOUBLE_EQ(r.reward, -1.0);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(env.observation(), 2);
}

TEST(LavaWorld, StepIntoGoalIsMinusOneTerminal) {
  LavaWorldEnv env = default_lava();
  env.reset(GridGoal{0, 2}, 0);
  const StepResult r = env.step(3);
  EXPECT_DOUBLE_EQ(r.reward, -1.0);
  EXPECT_TRUE(r.terminal);
}

TEST(LavaWorld, SteppingIntoLavaGoalStillCostsFifteen) {
  LavaWorldEnv env = default_lava();
  env.reset(GridGoal{1, 1}, 0);  // (1,1) is lava and also the goal.
  const StepResult r = env.step(1);  // Down into it.
  EXPECT_DOUBLE_EQ(r.reward, -15.0);
  EXPECT_TRUE(r.terminal);
}

TEST(LavaWorld, WallBumpStaysInPlace) {
  LavaWorldEnv env = default_lava();
  env.reset(GridGoal{4, 4}, 0);
  const StepResult r = env.step(0);  // Up from row 0: clamped.
  EXPECT_DOUBLE_EQ(r.reward, -1.0);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(env.observation(), 1);  // Still at (0,1).
}

TEST(LavaWorld, HorizonCapGivesMinusTwenty) {
  LavaWorldEnv env = default_lava();
  env.reset(GridGoal{4, 4}, 0);
  double total = 0.0;
  for (int t = 0; t < 20; ++t) {
    const StepResult r = env.step(0);  // Bump the top wall forever.
    total += r.reward;
    EXPECT_EQ(r.terminal, t == 19);
  }
  EXPECT_DOUBLE_EQ(total, -20.0);
  EXPECT_THROW(env.step(0), std::logic_error);
}

TEST(LavaWorld, ObservationHidesGoal) {
  LavaWorldEnv a = default_lava();
  LavaWorldEnv b = default_lava();
  a.reset(GridGoal{4, 4}, 0);
  b.reset(GridGoal{0, 0}, 0);
  EXPECT_EQ(a.observation(), b.observation());
  a.step(3);
  b.step(3);
  EXPECT_EQ(a.observation(), b.observation());
}

TEST(LavaWorld, CloneIsIndependent) {
  LavaWorldEnv env = default_lava();
  env.reset(GridGoal{0, 2}, 0);
  auto copy = env.clone();
  copy->reset(GridGoal{4, 4}, 0);
  copy->step(3);
  EXPECT_EQ(env.observation(), 1);  // Original episode untouched.
}

// Frozen shortest-path table for the shipped map, derived by hand and
// cross-checked against an independent breadth-first search. The walled-off
// floor pocket (4,0) is unreachable.
TEST(LavaWorld, DefaultMapShortestPaths) {
  const GridMap map = load_map(default_lava_map_text());
  const std::map<std::pair<int, int>, int> expected = {
      {{0, 0}, 1}, {{0, 2}, 1}, {{1, 0}, 2}, {{1, 2}, 2}, {{2, 2}, 3},
      {{3, 2}, 4}, {{3, 3}, 5}, {{3, 4}, 6}, {{4, 3}, 6}, {{4, 4}, 7},
      {{4, 0}, -1}};
  std::vector<bool> walkable(map.cells.size());
  for (size_t i = 0; i < map.cells.size(); ++i) {
    walkable[i] = map.cells[i] == Cell::kFloor;
  }
  const std::vector<int> dist = test::bfs_distances(
      map.height, map.width, walkable, map.index(map.start_row, map.start_col));
  int floor_goals = 0;
  for (const GridGoal& g : map.legal_goals()) {
    if (map.is_lava(g.row, g.col)) continue;
    ++floor_goals;
    const auto it = expected.find({g.row, g.col});
    ASSERT_NE(it, expected.end()) << "unlisted floor goal " << theta_label(g);
    EXPECT_EQ(dist[map.index(g.row, g.col)], it->second)
        << theta_label(Theta{g});
  }
  EXPECT_EQ(floor_goals, 11);
}

TEST(LavaWorld, ShortestPathWalkReturnsMinusDistance) {
  // Walk the 7-step route to (4,4): right, down x3, right x2 ... the exact
  // optimal route down the right branch.
  LavaWorldEnv env = default_lava();
  env.reset(GridGoal{4, 4}, 0);
  const int route[] = {3, 1, 1, 1, 3, 3, 1};  // (0,1)->(0,2)->(3,2)->(3,4)->(4,4)
  double total = 0.0;
  bool terminal = false;
  for (const int action : route) {
    ASSERT_FALSE(terminal);
    const StepResult r = env.step(action);
    total += r.reward;
    terminal = r.terminal;
  }
  EXPECT_TRUE(terminal);
  EXPECT_DOUBLE_EQ(total, -7.0);
}

}  // namespace
}  // namespace farr
