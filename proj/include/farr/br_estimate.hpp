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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "farr/q_learning.hpp"
#include "farr/upomdp.hpp"
#include "farr/value_iteration.hpp"

// One entry point for "how well can any policy do against this theta": exact
// backward induction when the environment exposes its model, averaged
// multi-seed Q-learning otherwise. Feasibility judgments key off these
// values, so the estimate records its per-seed spread for auditability.

namespace farr {

enum class BrMethod { kExact, kQLearning };

inline std::string br_method_name(BrMethod method) {
  return method == BrMethod::kExact ? "exact" : "qlearning";
}

inline BrMethod parse_br_method(const std::string& text) {
  if (text == "exact") return BrMethod::kExact;
  if (text == "qlearning") return BrMethod::kQLearning;
  throw std::invalid_argument("unknown best-response method: " + text);
}

struct BrConfig {
  BrMethod method = BrMethod::kExact;
  int seeds = 7;            // Independent Q-learning training runs.
  int eval_episodes = 100;  // Evaluation rollouts per trained policy.
  long long ql_budget = kDefaultQLearningBudget;
  QLearningParams ql;

  void check_valid() const {
    if (seeds < 1) throw std::invalid_argument("BrConfig: seeds must be >= 1");
    if (eval_episodes < 1) {
      throw std::invalid_argument("BrConfig: eval episodes must be >= 1");
    }
    if (ql_budget < 1) {
      throw std::invalid_argument("BrConfig: training budget must be >= 1");
    }
    ql.check_valid();
  }
};

struct BrEstimate {
  Theta theta;
  double value = 0.0;
  double std_error = 0.0;  // Across seeds (zero for the exact method).
  int seeds_used = 1;
  std::vector<double> per_seed_values;
};

// Exact method: one deterministic-by-construction solve, seeds_used = 1.
// Q-learning: `seeds` independent training runs, each evaluated by Monte
// Carlo (a single rollout suffices when the dynamics are deterministic), and
// the estimate is the mean over seeds.
inline BrEstimate estimate_br_value(Env& env, const Theta& theta,
                                    const BrConfig& config, Seed seed) {
  config.check_valid();
  BrEstimate estimate;
  estimate.theta = theta;
  if (config.method == BrMethod::kExact) {
    const BrResult br = value_iteration_br(env, theta);
    estimate.value = br.value;
    estimate.seeds_used = 1;
    estimate.per_seed_values = {br.value};
    return estimate;
  }
  const int episodes = env.deterministic_dynamics() ? 1 : config.eval_episodes;
  for (int s = 0; s < config.seeds; ++s) {
    const TabularPolicy policy =
        q_learning_br(env, theta, config.ql_budget, config.ql,
                      derive_seed(seed, "ql_train", Seed(s)));
    const UtilityEstimate utility = estimate_utility(
        env, theta, policy, episodes, derive_seed(seed, "ql_eval", Seed(s)));
    estimate.per_seed_values.push_back(utility.mean);
  }
  estimate.seeds_used = config.seeds;
  double sum = 0.0;
  for (const double v : estimate.per_seed_values) sum += v;
  estimate.value = sum / config.seeds;
  if (config.seeds > 1) {
    double ss = 0.0;
    for (const double v : estimate.per_seed_values) {
      ss += (v - estimate.value) * (v - estimate.value);
    }
    estimate.std_error =
        std::sqrt(ss / (config.seeds - 1) / config.seeds);
  }
  return estimate;
}

}  // namespace farr
