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
#include <memory>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "farr/upomdp.hpp"

// WindyWalk: a 1-D walk on integer positions [-15, 15] with a stochastic
// wind controlled by a continuous parameter theta = (alpha, beta). Each step
// the agent picks a displacement in {-1, 0, +1}; independently a draw
// X ~ Beta(alpha, beta) produces a wind displacement (+1 if X > 0.7, -1 if
// X < 0.3, else 0). The reward is the clamped position change, so the return
// telescopes to (final position - start position). Walking right as fast as
// possible is optimal for every theta: payoffs differ only through how hard
// the wind pushes back, which is what makes the (alpha, beta) box a clean
// continuous adversary space with a nontrivial feasibility landscape.

namespace farr {

inline constexpr int kWindyMinPosition = -15;
inline constexpr int kWindyMaxPosition = 15;
inline constexpr int kWindyHorizon = 50;
inline constexpr int kWindyActionCount = 3;  // Displacement = action - 1.
inline constexpr double kWindLeftThreshold = 0.3;
inline constexpr double kWindRightThreshold = 0.7;
inline constexpr double kWindyShapeMax = 10.0;

inline int wind_from_sample(double x) {
  if (x > kWindRightThreshold) return 1;
  if (x < kWindLeftThreshold) return -1;
  return 0;
}

// Exact wind displacement distribution via the regularized incomplete beta
// function (the Beta CDF): left = P(X < 0.3), right = P(X > 0.7).
struct WindProbs {
  double left = 0.0;
  double stay = 0.0;
  double right = 0.0;
};

inline WindProbs wind_probabilities(const BetaParams& theta) {
  const double cdf_left =
      boost::math::ibeta(theta.alpha, theta.beta, kWindLeftThreshold);
  const double cdf_right =
      boost::math::ibeta(theta.alpha, theta.beta, kWindRightThreshold);
  return {cdf_left, cdf_right - cdf_left, 1.0 - cdf_right};
}

struct WindyOutcome {
  int next_position = 0;
  double reward = 0.0;
  int wind = 0;
};

inline WindyOutcome windy_step(int position, int action,
                               const BetaParams& theta, Rng& rng) {
  if (action < 0 || action >= kWindyActionCount) {
    throw std::invalid_argument("windy_step: bad action");
  }
  const double x = sample_beta(rng, theta.alpha, theta.beta);
  WindyOutcome out;
  out.wind = wind_from_sample(x);
  out.next_position =
      std::clamp(position + (action - 1) + out.wind, kWindyMinPosition,
                 kWindyMaxPosition);
  out.reward = out.next_position - position;
  return out;
}

inline WindyOutcome windy_step_seeded(int position, int action,
                                      const BetaParams& theta, Seed seed) {
  Rng rng = make_rng(seed);
  return windy_step(position, action, theta, rng);
}

// The canonical 11-point discretization per axis: {0.01, 1, 2, ..., 10}.
inline std::vector<double> windy_grid_values() {
  std::vector<double> values = {0.01};
  for (int v = 1; v <= 10; ++v) values.push_back(static_cast<double>(v));
  return values;
}

class WindyWalkEnv final : public Env {
 public:
  explicit WindyWalkEnv(bool time_in_observation = false)
      : time_in_observation_(time_in_observation) {
    position_count_ = kWindyMaxPosition - kWindyMinPosition + 1;
    spec_.action_count = kWindyActionCount;
    spec_.observation_count =
        position_count_ * (time_in_observation_ ? kWindyHorizon : 1);
    spec_.horizon = kWindyHorizon;
    spec_.discount = 1.0;
    const std::vector<double> values = windy_grid_values();
    for (const double a : values) {
      for (const double b : values) {
        spec_.theta_space.grid.push_back(BetaParams{a, b});
      }
    }
    spec_.theta_space.continuous = true;
    spec_.theta_space.alpha_max = kWindyShapeMax;
    spec_.theta_space.beta_max = kWindyShapeMax;
    spec_.check_valid();
  }

  const UpomdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "windy_walk"; }
  bool deterministic_dynamics() const override { return false; }
  double max_return() const override {
    return kWindyMaxPosition;  // Start is 0; position is capped at +15.
  }
  double min_return() const override { return kWindyMinPosition; }
  bool time_in_observation() const { return time_in_observation_; }
  int position_count() const { return position_count_; }

  void check_theta(const Theta& theta) const override {
    const BetaParams* b = std::get_if<BetaParams>(&theta);
    if (b == nullptr) {
      throw std::invalid_argument("WindyWalkEnv: theta must be BetaParams");
    }
    if (!(b->alpha > 0.0) || b->alpha > kWindyShapeMax || !(b->beta > 0.0) ||
        b->beta > kWindyShapeMax) {
      throw std::invalid_argument(
          "WindyWalkEnv: shape parameters must lie in (0, 10]");
    }
  }

  void reset(const Theta& theta, Seed seed) override {
    check_theta(theta);
    theta_ = std::get<BetaParams>(theta);
    position_ = 0;
    steps_ = 0;
    done_ = false;
    rng_ = make_rng(derive_seed(seed, "wind"));
  }

  int observation() const override {
    const int pos_id = position_ - kWindyMinPosition;
    if (!time_in_observation_) return pos_id;
    const int t = std::min(steps_, kWindyHorizon - 1);
    return t * position_count_ + pos_id;
  }

  StepResult step(int action) override {
    if (done_) throw std::logic_error("WindyWalkEnv: step after terminal");
    const WindyOutcome out = windy_step(position_, action, theta_, rng_);
    position_ = out.next_position;
    ++steps_;
    done_ = steps_ >= kWindyHorizon;
    return {out.reward, done_};
  }

  std::unique_ptr<Env> clone() const override {
    return std::make_unique<WindyWalkEnv>(*this);
  }

 private:
  bool time_in_observation_ = false;
  int position_count_ = 0;
  UpomdpSpec spec_;
  BetaParams theta_;
  int position_ = 0;
  int steps_ = 0;
  bool done_ = false;
  Rng rng_;
};

}  // namespace farr
