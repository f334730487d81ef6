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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "farr/lava_world.hpp"
#include "farr/policy.hpp"
#include "farr/upomdp.hpp"
#include "farr/windy_walk.hpp"

// Exact best responses by finite-horizon backward induction, for
// environments that expose their model. Ties always break toward the lowest
// action index. The mixture solver handles the hidden-goal belief problem in
// Lava World exactly: since the agent observes nothing about the goal until
// the episode ends, an optimal response to a goal mixture is an open-loop
// walk, and the only state that matters is (position, set of
// positive-weight floor goals already swept, time). Each active goal pays
// the running step cost, so the Bellman backup weights rewards by the
// remaining unswept probability mass.

namespace farr {

struct BrResult {
  TabularPolicy policy;
  double value = 0.0;
};

namespace detail {

inline int argmax_action_lowest(const double* values, int count) {
  int best = 0;
  for (int a = 1; a < count; ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

// Exact optimal response to a weight distribution over Lava World goals.
inline BrResult lava_mixture_vi(const LavaWorldEnv& env,
                                const std::vector<Theta>& thetas,
                                const std::vector<double>& weights) {
  const GridMap& map = env.map();
  const int cells = map.height * map.width;
  const int horizon = env.spec().horizon;

  // Weight per goal cell; positive-weight floor goals get visited-set bits.
  std::vector<double> cell_weight(cells, 0.0);
  double total = 0.0;
  for (size_t k = 0; k < thetas.size(); ++k) {
    env.check_theta(thetas[k]);
    if (!(weights[k] >= 0.0)) {
      throw std::invalid_argument("mixture weights must be nonnegative");
    }
    const GridGoal goal = std::get<GridGoal>(thetas[k]);
    cell_weight[map.index(goal.row, goal.col)] += weights[k];
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }

  std::vector<int> goal_bit(cells, -1);
  std::vector<double> bit_weight;
  for (int i = 0; i < cells; ++i) {
    if (cell_weight[i] > 0.0 && map.cells[i] == Cell::kFloor) {
      goal_bit[i] = static_cast<int>(bit_weight.size());
      bit_weight.push_back(cell_weight[i]);
    }
  }
  const int bits = static_cast<int>(bit_weight.size());
  if (bits > 20) {
    throw std::invalid_argument(
        "lava mixture best response: too many distinct floor goals (" +
        std::to_string(bits) + ") for the visited-set solver");
  }
  const std::uint32_t masks = 1u << bits;

  // remaining[v] = probability mass of goals not yet swept under mask v
  // (lava-cell goal mass never leaves until the episode ends).
  std::vector<double> remaining(masks);
  for (std::uint32_t v = 0; v < masks; ++v) {
    double w = 1.0;
    for (int b = 0; b < bits; ++b) {
      if (v & (1u << b)) w -= bit_weight[b];
    }
    remaining[v] = w;
  }

  // value[t][pos * masks + v]; rolled over t from horizon downward.
  const size_t layer = static_cast<size_t>(cells) * masks;
  std::vector<double> next_layer(layer, 0.0);
  std::vector<double> cur_layer(layer, 0.0);
  // best_action[t] stored for plan extraction.
  std::vector<std::vector<std::uint8_t>> best_action(
      horizon, std::vector<std::uint8_t>(layer, 0));

  for (int t = horizon - 1; t >= 0; --t) {
    for (int pos = 0; pos < cells; ++pos) {
      const int r = pos / map.width;
      const int c = pos % map.width;
      for (std::uint32_t v = 0; v < masks; ++v) {
        const double w = remaining[v];
        double action_values[kLavaActionCount];
        for (int a = 0; a < kLavaActionCount; ++a) {
          const auto [nr, nc] = env.move(r, c, a);
          const int ni = map.index(nr, nc);
          double value;
          if (map.cells[ni] == Cell::kLava) {
            value = kLavaLavaReward * w;  // Every active episode ends here.
          } else {
            std::uint32_t nv = v;
            if (goal_bit[ni] >= 0 && !(v & (1u << goal_bit[ni]))) {
              nv = v | (1u << goal_bit[ni]);
            }
            value = kLavaStepReward * w +
                    (t + 1 < horizon ? next_layer[static_cast<size_t>(ni) *
                                                      masks + nv]
                                     : 0.0);
          }
          action_values[a] = value;
        }
        const int best = argmax_action_lowest(action_values, kLavaActionCount);
        cur_layer[static_cast<size_t>(pos) * masks + v] = action_values[best];
        best_action[t][static_cast<size_t>(pos) * masks + v] =
            static_cast<std::uint8_t>(best);
      }
    }
    next_layer.swap(cur_layer);
  }
  // After the final swap the t=0 layer lives in next_layer.
  const int start = map.index(map.start_row, map.start_col);
  BrResult result;
  result.value = next_layer[static_cast<size_t>(start) * masks + 0];

  // Extract the realized open-loop walk into a (position, time) plan.
  std::vector<std::vector<int>> plan(
      horizon, std::vector<int>(env.spec().observation_count, 0));
  int pos = start;
  std::uint32_t v = 0;
  for (int t = 0; t < horizon; ++t) {
    const int a = best_action[t][static_cast<size_t>(pos) * masks + v];
    plan[t][pos] = a;
    const auto [nr, nc] = env.move(pos / map.width, pos % map.width, a);
    const int ni = map.index(nr, nc);
    if (map.cells[ni] == Cell::kLava) break;
    if (goal_bit[ni] >= 0) v |= (1u << goal_bit[ni]);
    pos = ni;
  }
  result.policy = TabularPolicy::from_plan(plan, env.spec().observation_count,
                                           env.spec().action_count);
  result.policy.metadata = "lava_mixture_vi over " +
                           std::to_string(thetas.size()) + " goals";
  return result;
}

inline BrResult windy_vi(const WindyWalkEnv& env, const BetaParams& theta) {
  env.check_theta(theta);
  const WindProbs w = wind_probabilities(theta);
  const double wind_probs[3] = {w.left, w.stay, w.right};
  const int positions = env.position_count();
  const int horizon = env.spec().horizon;

  std::vector<double> next(positions, 0.0);
  std::vector<double> cur(positions, 0.0);
  std::vector<std::vector<int>> plan_by_position(
      horizon, std::vector<int>(positions, 0));
  for (int t = horizon - 1; t >= 0; --t) {
    for (int p = 0; p < positions; ++p) {
      const int pos = p + kWindyMinPosition;
      double action_values[kWindyActionCount];
      for (int a = 0; a < kWindyActionCount; ++a) {
        double ev = 0.0;
        for (int k = 0; k < 3; ++k) {
          const int np = std::clamp(pos + (a - 1) + (k - 1), kWindyMinPosition,
                                    kWindyMaxPosition);
          ev += wind_probs[k] *
                ((np - pos) + (t + 1 < horizon ? next[np - kWindyMinPosition]
                                               : 0.0));
        }
        action_values[a] = ev;
      }
      const int best = argmax_action_lowest(action_values, kWindyActionCount);
      cur[p] = action_values[best];
      plan_by_position[t][p] = best;
    }
    next.swap(cur);
  }
  BrResult result;
  result.value = next[0 - kWindyMinPosition];

  if (!env.time_in_observation()) {
    result.policy = TabularPolicy::from_plan(
        plan_by_position, env.spec().observation_count,
        env.spec().action_count);
  } else {
    // Observations already encode time, so a stationary table suffices.
    std::vector<int> actions(env.spec().observation_count, 0);
    for (int t = 0; t < horizon; ++t) {
      for (int p = 0; p < positions; ++p) {
        actions[t * positions + p] = plan_by_position[t][p];
      }
    }
    result.policy = TabularPolicy::from_actions(actions,
                                                env.spec().action_count);
  }
  result.policy.metadata = "windy_vi " + theta_label(Theta{theta});
  return result;
}

}  // namespace detail

// Exact best response to a single parameter; requires an environment with an
// exposed model (Lava World or WindyWalk). The tolerance parameter exists
// for interface uniformity with iterative solvers; backward induction over a
// finite horizon is exact, so it is ignored.
inline BrResult value_iteration_br(const Env& env, const Theta& theta,
                                   double /*tolerance*/ = 0.0) {
  if (const auto* lava = dynamic_cast<const LavaWorldEnv*>(&env)) {
    return detail::lava_mixture_vi(*lava, {theta}, {1.0});
  }
  if (const auto* windy = dynamic_cast<const WindyWalkEnv*>(&env)) {
    return detail::windy_vi(*windy, std::get<BetaParams>(theta));
  }
  throw std::invalid_argument(
      "value_iteration_br: no exact model available for " + env.name());
}

// Exact best response to a mixture over parameters. Lava World is solved via
// the visited-set construction above; WindyWalk only supports degenerate
// (single-parameter) mixtures — a belief over wind parameters is not
// tabularly tractable.
inline BrResult value_iteration_br_mixture(const Env& env,
                                           const std::vector<Theta>& thetas,
                                           const std::vector<double>& weights) {
  if (thetas.empty() || thetas.size() != weights.size()) {
    throw std::invalid_argument(
        "value_iteration_br_mixture: thetas/weights size mismatch");
  }
  if (const auto* lava = dynamic_cast<const LavaWorldEnv*>(&env)) {
    return detail::lava_mixture_vi(*lava, thetas, weights);
  }
  // Degenerate mixtures collapse to the single-theta solver everywhere.
  int support = 0;
  size_t support_index = 0;
  double total = 0.0;
  for (size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0)) {
      throw std::invalid_argument("mixture weights must be nonnegative");
    }
    if (weights[k] > 0.0) {
      ++support;
      support_index = k;
    }
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  if (support == 1) return value_iteration_br(env, thetas[support_index]);
  throw std::invalid_argument(
      "value_iteration_br_mixture: belief space intractable for " +
      env.name());
}

}  // namespace farr
