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

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "farr/grid_map.hpp"
#include "farr/upomdp.hpp"

// Lava World: a gridworld whose hidden parameter is the goal cell. The agent
// pays -1 per step; stepping into lava ends the episode at -15 (replacing
// that step's -1), even if the goal sits in the lava. Reaching the goal ends
// the episode with the final step's -1 already paid, so a k-step shortest
// path is worth exactly -k. The goal is invisible: observations are the
// agent's position only, which is what makes robustness over goals a
// nontrivial mixture-planning problem.

namespace farr {

inline constexpr int kLavaActionCount = 4;  // up, down, left, right.
inline constexpr int kLavaHorizon = 20;
inline constexpr double kLavaStepReward = -1.0;
inline constexpr double kLavaLavaReward = -15.0;

class LavaWorldEnv final : public Env {
 public:
  explicit LavaWorldEnv(GridMap map) : map_(std::move(map)) {
    spec_.action_count = kLavaActionCount;
    spec_.observation_count = map_.height * map_.width;
    spec_.horizon = kLavaHorizon;
    spec_.discount = 1.0;
    for (const GridGoal& goal : map_.legal_goals()) {
      spec_.theta_space.grid.push_back(goal);
    }
    spec_.check_valid();
  }

  const UpomdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "lava_world"; }
  bool deterministic_dynamics() const override { return true; }
  // Best case is a goal adjacent to the start: one -1 step.
  double max_return() const override { return kLavaStepReward; }
  // Worst case wanders for horizon - 1 steps, then falls into lava.
  double min_return() const override {
    return (kLavaHorizon - 1) * kLavaStepReward + kLavaLavaReward;
  }

  const GridMap& map() const { return map_; }

  void check_theta(const Theta& theta) const override {
    const GridGoal* goal = std::get_if<GridGoal>(&theta);
    if (goal == nullptr) {
      throw std::invalid_argument("LavaWorldEnv: theta must be a grid goal");
    }
    if (!map_.in_bounds(goal->row, goal->col)) {
      throw std::invalid_argument("LavaWorldEnv: goal out of bounds");
    }
    if (map_.is_start(goal->row, goal->col)) {
      throw std::invalid_argument("LavaWorldEnv: goal may not be the start");
    }
  }

  // Clamped 4-connected movement; bumping a wall stays in place.
  std::pair<int, int> move(int r, int c, int action) const {
    static constexpr int dr[] = {-1, 1, 0, 0};
    static constexpr int dc[] = {0, 0, -1, 1};
    if (action < 0 || action >= kLavaActionCount) {
      throw std::invalid_argument("LavaWorldEnv: bad action");
    }
    const int nr = r + dr[action];
    const int nc = c + dc[action];
    if (!map_.in_bounds(nr, nc)) return {r, c};
    return {nr, nc};
  }

  void reset(const Theta& theta, Seed /*seed*/) override {
    check_theta(theta);
    goal_ = std::get<GridGoal>(theta);
    row_ = map_.start_row;
    col_ = map_.start_col;
    steps_ = 0;
    done_ = false;
  }

  int observation() const override { return map_.index(row_, col_); }

  StepResult step(int action) override {
    if (done_) throw std::logic_error("LavaWorldEnv: step after terminal");
    const auto [nr, nc] = move(row_, col_, action);
    row_ = nr;
    col_ = nc;
    ++steps_;
    StepResult result;
    if (map_.is_lava(nr, nc)) {
      result.reward = kLavaLavaReward;  // Replaces the step cost, goal or not.
      result.terminal = true;
    } else if (nr == goal_.row && nc == goal_.col) {
      result.reward = kLavaStepReward;
      result.terminal = true;
    } else {
      result.reward = kLavaStepReward;
      result.terminal = steps_ >= kLavaHorizon;
    }
    done_ = result.terminal;
    return result;
  }

  std::unique_ptr<Env> clone() const override {
    return std::make_unique<LavaWorldEnv>(*this);
  }

 private:
  GridMap map_;
  UpomdpSpec spec_;
  GridGoal goal_;
  int row_ = 0;
  int col_ = 0;
  int steps_ = 0;
  bool done_ = false;
};

// The shipped default map: lava goals are the majority (13 of 24), a branch
// structure gives feasible goals in two separate directions (so no single
// sweep covers them all cheaply), and one floor pocket is walled off by lava
// — unreachable, hence infeasible at lambda = -10 despite not being lava,
// which keeps feasibility from degenerating to "not lava".
inline const char* default_lava_map_text() {
  return
      ". S . L L\n"
      ". L . L L\n"
      "L L . L L\n"
      "L L . . .\n"
      ". L L . .\n";
}

}  // namespace farr
