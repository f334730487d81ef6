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
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "farr/policy.hpp"
#include "farr/rng.hpp"
#include "farr/strings.hpp"

// The underspecified-POMDP abstraction: a family of POMDPs indexed by a
// hidden environment parameter theta that the adversary controls. This header
// holds the parameter types, the episode record, the abstract environment
// interface, and Monte Carlo utility estimation.

namespace farr {

// --- Environment parameters ------------------------------------------------

struct GridGoal {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridGoal& a, const GridGoal& b) {
    return a.row == b.row && a.col == b.col;
  }
  friend bool operator<(const GridGoal& a, const GridGoal& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  }
};

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
  friend bool operator==(const BetaParams& a, const BetaParams& b) {
    return a.alpha == b.alpha && a.beta == b.beta;
  }
  friend bool operator<(const BetaParams& a, const BetaParams& b) {
    return a.alpha != b.alpha ? a.alpha < b.alpha : a.beta < b.beta;
  }
};

using Theta = std::variant<GridGoal, BetaParams>;

inline std::string theta_label(const Theta& theta) {
  if (const auto* g = std::get_if<GridGoal>(&theta)) {
    return "goal_r" + std::to_string(g->row) + "_c" + std::to_string(g->col);
  }
  const auto& b = std::get<BetaParams>(theta);
  return "beta_a" + format_double(b.alpha) + "_b" + format_double(b.beta);
}

// Stable per-theta seed stream label.
inline Seed theta_seed_label(const Theta& theta) {
  return hash_label(theta_label(theta));
}

// --- Spec / trajectory ------------------------------------------------------

// Legal parameter values: always carries the canonical enumeration used for
// sampling and discretized evaluation; `continuous` marks spaces where any
// BetaParams inside (0, alpha_max] x (0, beta_max] is additionally legal.
struct ThetaSpace {
  std::vector<Theta> grid;
  bool continuous = false;
  double alpha_max = 10.0;
  double beta_max = 10.0;
};

struct UpomdpSpec {
  int action_count = 0;
  int observation_count = 0;
  int horizon = 0;
  double discount = 1.0;
  ThetaSpace theta_space;

  void check_valid() const {
    if (action_count < 1 || observation_count < 1 || horizon < 1) {
      throw std::invalid_argument("UpomdpSpec: bad counts");
    }
    if (!(discount >= 0.0 && discount <= 1.0)) {
      throw std::invalid_argument("UpomdpSpec: discount must be in [0, 1]");
    }
  }
};

struct TrajectoryStep {
  int observation = 0;
  int action = 0;
  double reward = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double return_value = 0.0;  // Discounted sum of rewards.
};

struct StepResult {
  double reward = 0.0;
  bool terminal = false;
};

// --- Abstract environment ---------------------------------------------------

// One instance holds one episode's state; concurrent rollouts use separate
// instances (clone() before reset). Everything observable is an integer id.
class Env {
 public:
  virtual ~Env() = default;
  virtual const UpomdpSpec& spec() const = 0;
  virtual std::string name() const = 0;
  // True when (theta, policy) fully determine the trajectory (no env noise).
  virtual bool deterministic_dynamics() const = 0;
  // Declared return bounds over all theta and policies (penalty validation).
  virtual double max_return() const = 0;
  virtual double min_return() const = 0;
  virtual void check_theta(const Theta& theta) const = 0;

  virtual void reset(const Theta& theta, Seed seed) = 0;
  virtual int observation() const = 0;
  virtual StepResult step(int action) = 0;

  virtual std::unique_ptr<Env> clone() const = 0;
};

// --- Rollouts and estimation ------------------------------------------------

// Plays one episode: reset with theta, then step the policy until terminal
// or horizon. Deterministic given (theta, policy, seed): the environment and
// the policy's action sampling get independent derived streams.
inline Trajectory rollout(Env& env, const Theta& theta,
                          const TabularPolicy& policy, Seed seed) {
  const UpomdpSpec& spec = env.spec();
  if (policy.observation_count != spec.observation_count ||
      policy.action_count != spec.action_count) {
    throw std::invalid_argument(
        "rollout: policy/environment space mismatch (policy " +
        std::to_string(policy.observation_count) + "x" +
        std::to_string(policy.action_count) + " vs env " +
        std::to_string(spec.observation_count) + "x" +
        std::to_string(spec.action_count) + ")");
  }
  env.check_theta(theta);
  env.reset(theta, derive_seed(seed, "env"));
  Rng action_rng = make_rng(derive_seed(seed, "policy"));

  Trajectory trajectory;
  double gamma_pow = 1.0;
  for (int t = 0; t < spec.horizon; ++t) {
    const int obs = env.observation();
    const int action = policy.sample_action(action_rng, obs, t);
    const StepResult result = env.step(action);
    trajectory.steps.push_back({obs, action, result.reward});
    trajectory.return_value += gamma_pow * result.reward;
    gamma_pow *= spec.discount;
    if (result.terminal) break;
  }
  return trajectory;
}

struct UtilityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int episodes = 0;
};

// Mean return over `episodes` independent rollouts with per-episode derived
// seeds; the sample standard error makes near-threshold feasibility calls
// auditable.
inline UtilityEstimate estimate_utility(Env& env, const Theta& theta,
                                        const TabularPolicy& policy,
                                        int episodes, Seed seed) {
  if (episodes < 1) {
    throw std::invalid_argument("estimate_utility: episodes must be >= 1");
  }
  std::vector<double> returns(episodes);
  for (int e = 0; e < episodes; ++e) {
    returns[e] =
        rollout(env, theta, policy, derive_seed(seed, "episode", Seed(e)))
            .return_value;
  }
  UtilityEstimate est;
  est.episodes = episodes;
  for (const double r : returns) est.mean += r;
  est.mean /= episodes;
  if (episodes > 1) {
    double ss = 0.0;
    for (const double r : returns) ss += (r - est.mean) * (r - est.mean);
    est.std_error = std::sqrt(ss / (episodes - 1) / episodes);
  }
  return est;
}

// --- Mixed strategies --------------------------------------------------------

// A mixed strategy over tabular policies: one policy is drawn per episode.
struct PolicyMixture {
  std::vector<TabularPolicy> policies;
  std::vector<double> weights;

  static PolicyMixture pure(TabularPolicy policy) {
    PolicyMixture m;
    m.policies.push_back(std::move(policy));
    m.weights.push_back(1.0);
    return m;
  }

  bool deterministic_policies() const {
    for (const TabularPolicy& p : policies) {
      if (!p.deterministic()) return false;
    }
    return true;
  }

  void check_valid() const {
    if (policies.empty() || policies.size() != weights.size()) {
      throw std::invalid_argument("PolicyMixture: policies/weights mismatch");
    }
    double total = 0.0;
    for (const double w : weights) {
      if (!(w >= 0.0)) {
        throw std::invalid_argument("PolicyMixture: negative weight");
      }
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("PolicyMixture: weights must sum to 1");
    }
    for (const TabularPolicy& p : policies) p.check_valid();
  }
};

// Expected return of a mixed strategy. When both the dynamics and every
// support policy are deterministic, each policy has exactly one trajectory,
// so the expectation is enumerated exactly (zero variance) instead of
// sampled. Otherwise one policy is drawn per episode from a dedicated
// stream; with a single-policy mixture the episode seeds then coincide with
// estimate_utility's, so the two agree bit for bit.
inline UtilityEstimate estimate_mixture_utility(Env& env, const Theta& theta,
                                                const PolicyMixture& mixture,
                                                int episodes, Seed seed) {
  mixture.check_valid();
  if (episodes < 1) {
    throw std::invalid_argument(
        "estimate_mixture_utility: episodes must be >= 1");
  }
  UtilityEstimate est;
  if (env.deterministic_dynamics() && mixture.deterministic_policies()) {
    est.episodes = episodes;
    double mean = 0.0;
    std::vector<double> returns(mixture.policies.size());
    for (size_t k = 0; k < mixture.policies.size(); ++k) {
      returns[k] = rollout(env, theta, mixture.policies[k], seed).return_value;
      mean += mixture.weights[k] * returns[k];
    }
    est.mean = mean;
    est.std_error = 0.0;
    return est;
  }
  Rng choice_rng = make_rng(derive_seed(seed, "policy_choice"));
  std::vector<double> returns(episodes);
  for (int e = 0; e < episodes; ++e) {
    const size_t k = sample_index(choice_rng, mixture.weights);
    returns[e] = rollout(env, theta, mixture.policies[k],
                         derive_seed(seed, "episode", Seed(e)))
                     .return_value;
  }
  est.episodes = episodes;
  for (const double r : returns) est.mean += r;
  est.mean /= episodes;
  if (episodes > 1) {
    double ss = 0.0;
    for (const double r : returns) ss += (r - est.mean) * (r - est.mean);
    est.std_error = std::sqrt(ss / (episodes - 1) / episodes);
  }
  return est;
}

}  // namespace farr
