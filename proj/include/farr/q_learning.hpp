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
#include <stdexcept>
#include <string>
#include <vector>

#include "farr/policy.hpp"
#include "farr/rng.hpp"
#include "farr/upomdp.hpp"

// Tabular Q-learning best responses for environments without an exposed
// model. Training is budgeted in environment steps, exploration is
// epsilon-greedy with a linear decay indexed by the global step count, and
// the returned policy is the deterministic greedy policy (lowest action
// index on ties). Everything is a pure function of (environment, budget,
// hyperparameters, seed), so runs replay bit-for-bit.

namespace farr {

inline constexpr long long kDefaultQLearningBudget = 150000;

struct QLearningParams {
  double learning_rate = 0.1;
  double epsilon_start = 0.5;
  double epsilon_end = 0.01;
  long long epsilon_decay_steps = 20000;
  double q_init = 0.0;

  void check_valid() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
      throw std::invalid_argument("QLearningParams: bad learning rate");
    }
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
        !(epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
      throw std::invalid_argument("QLearningParams: epsilons must be in [0,1]");
    }
    if (epsilon_decay_steps < 1) {
      throw std::invalid_argument("QLearningParams: bad decay horizon");
    }
  }
};

// Trains against theta drawn from a mixture at every episode reset; a
// single-point mixture is plain fixed-parameter training. The greedy policy
// is read out once at the end of the budget.
inline TabularPolicy q_learning_br_mixture(Env& env,
                                           const std::vector<Theta>& thetas,
                                           const std::vector<double>& weights,
                                           long long budget,
                                           const QLearningParams& params,
                                           Seed seed) {
  if (budget < 1) {
    throw std::invalid_argument("q_learning_br: budget must be >= 1");
  }
  params.check_valid();
  if (thetas.empty() || thetas.size() != weights.size()) {
    throw std::invalid_argument(
        "q_learning_br_mixture: thetas/weights size mismatch");
  }
  for (const Theta& theta : thetas) env.check_theta(theta);

  const UpomdpSpec& spec = env.spec();
  const int obs_count = spec.observation_count;
  const int action_count = spec.action_count;
  std::vector<double> q(static_cast<size_t>(obs_count) * action_count,
                        params.q_init);
  const auto greedy = [&](int obs) {
    const double* row = &q[static_cast<size_t>(obs) * action_count];
    int best = 0;
    for (int a = 1; a < action_count; ++a) {
      if (row[a] > row[best]) best = a;
    }
    return best;
  };

  Rng explore_rng = make_rng(derive_seed(seed, "explore"));
  Rng theta_rng = make_rng(derive_seed(seed, "theta"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, action_count - 1);

  long long global_step = 0;
  long long episode = 0;
  while (global_step < budget) {
    const Theta& theta = thetas[sample_index(theta_rng, weights)];
    env.reset(theta, derive_seed(seed, "episode", Seed(episode)));
    ++episode;
    bool terminal = false;
    while (!terminal && global_step < budget) {
      const double frac =
          std::min(1.0, static_cast<double>(global_step) /
                            static_cast<double>(params.epsilon_decay_steps));
      const double epsilon =
          params.epsilon_start + frac * (params.epsilon_end -
                                         params.epsilon_start);
      const int obs = env.observation();
      const int action = unit(explore_rng) < epsilon
                             ? random_action(explore_rng)
                             : greedy(obs);
      const StepResult result = env.step(action);
      terminal = result.terminal;
      double target = result.reward;
      if (!terminal) {
        const int next_obs = env.observation();
        target += spec.discount *
                  q[static_cast<size_t>(next_obs) * action_count +
                    greedy(next_obs)];
      }
      double& cell = q[static_cast<size_t>(obs) * action_count + action];
      cell += params.learning_rate * (target - cell);
      ++global_step;
    }
  }

  std::vector<int> actions(obs_count);
  for (int obs = 0; obs < obs_count; ++obs) actions[obs] = greedy(obs);
  TabularPolicy policy = TabularPolicy::from_actions(actions, action_count);
  policy.metadata = "q_learning budget=" + std::to_string(budget);
  return policy;
}

inline TabularPolicy q_learning_br(Env& env, const Theta& theta,
                                   long long budget,
                                   const QLearningParams& params, Seed seed) {
  return q_learning_br_mixture(env, {theta}, {1.0}, budget, params, seed);
}

}  // namespace farr
