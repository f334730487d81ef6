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
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "farr/br_estimate.hpp"
#include "farr/feasibility.hpp"
#include "farr/matrix_game.hpp"
#include "farr/parallel.hpp"
#include "farr/policy.hpp"
#include "farr/q_learning.hpp"
#include "farr/rng.hpp"
#include "farr/strings.hpp"
#include "farr/upomdp.hpp"
#include "farr/value_iteration.hpp"

namespace farr {

// --- Objectives -------------------------------------------------------------

// The three game objectives the engine can optimize. All three share the same
// population dynamics; they differ only in how a payoff cell is scored:
//   farr     feasibility-penalized utility (penalty C on infeasible theta),
//   minimax  raw protagonist utility,
//   regret   utility minus the best-response value for theta (always <= 0 in
//            expectation; the row player drives it toward 0, the column
//            player, who minimizes, seeks theta with large shortfall).
enum class Objective {
  kFarr,
  kMinimax,
  kRegret,
};

inline std::string objective_name(Objective objective) {
  switch (objective) {
    case Objective::kFarr:
      return "farr";
    case Objective::kMinimax:
      return "minimax";
    case Objective::kRegret:
      return "regret";
  }
  throw std::logic_error("objective_name: unknown objective");
}

inline Objective parse_objective(const std::string& name) {
  if (name == "farr") return Objective::kFarr;
  if (name == "minimax") return Objective::kMinimax;
  if (name == "regret") return Objective::kRegret;
  throw std::invalid_argument("parse_objective: unknown objective '" + name +
                              "'");
}

// --- Configuration ----------------------------------------------------------

struct PsroConfig {
  double lambda = 0.0;     // Feasibility threshold.
  double penalty_c = 0.0;  // Infeasibility penalty; must exceed max return.
  int iterations = 25;     // Population-growth iteration cap.
  long long fp_iterations = 2000;  // Fictitious play budget per restricted NE.
  int initial_thetas = 3;          // Adversary population at initialization.
  int thetas_per_iteration = 3;    // New adversary strategies per iteration.
  int rollouts_deterministic = 1;  // Payoff rollouts, deterministic dynamics.
  int rollouts_stochastic = 100;   // Payoff rollouts, stochastic dynamics.
  int eval_episodes = 100;  // Episodes per theta for the worst-case metric.
  int threads = 1;          // Worker threads for independent jobs.
  BrConfig br;              // Best-response method for all BR jobs.

  void check_valid() const {
    if (!std::isfinite(lambda)) {
      throw std::invalid_argument("PsroConfig: lambda must be finite");
    }
    if (!std::isfinite(penalty_c)) {
      throw std::invalid_argument("PsroConfig: penalty_c must be finite");
    }
    if (iterations < 1) {
      throw std::invalid_argument("PsroConfig: iterations must be >= 1");
    }
    if (fp_iterations < 1) {
      throw std::invalid_argument("PsroConfig: fp_iterations must be >= 1");
    }
    if (initial_thetas < 1) {
      throw std::invalid_argument("PsroConfig: initial_thetas must be >= 1");
    }
    if (thetas_per_iteration < 1) {
      throw std::invalid_argument(
          "PsroConfig: thetas_per_iteration must be >= 1");
    }
    if (rollouts_deterministic < 1 || rollouts_stochastic < 1) {
      throw std::invalid_argument("PsroConfig: rollout counts must be >= 1");
    }
    if (eval_episodes < 1) {
      throw std::invalid_argument("PsroConfig: eval_episodes must be >= 1");
    }
    if (threads < 1) {
      throw std::invalid_argument("PsroConfig: threads must be >= 1");
    }
    br.check_valid();
  }
};

// --- Payoff table -----------------------------------------------------------

// One estimated restricted-game payoff plus its provenance. rollouts == 0
// marks a cell that has not been evaluated yet.
struct PayoffCell {
  double value = 0.0;
  int rollouts = 0;
  Seed seed = 0;
};

struct PayoffTable {
  int rows = 0;
  int cols = 0;
  std::vector<PayoffCell> cells;  // Row-major, rows * cols entries.

  const PayoffCell& at(int i, int j) const {
    return cells[static_cast<size_t>(i) * cols + j];
  }
  PayoffCell& at(int i, int j) {
    return cells[static_cast<size_t>(i) * cols + j];
  }

  // Extends the table, preserving existing cells at their (i, j) positions;
  // new cells start unfilled.
  void grow(int new_rows, int new_cols) {
    if (new_rows < rows || new_cols < cols) {
      throw std::invalid_argument("PayoffTable: grow cannot shrink");
    }
    std::vector<PayoffCell> next(static_cast<size_t>(new_rows) * new_cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        next[static_cast<size_t>(i) * new_cols + j] = at(i, j);
      }
    }
    rows = new_rows;
    cols = new_cols;
    cells = std::move(next);
  }

  bool complete() const {
    if (rows < 1 || cols < 1) return false;
    for (const PayoffCell& cell : cells) {
      if (cell.rollouts <= 0) return false;
    }
    return true;
  }

  void check_valid() const {
    if (rows < 0 || cols < 0 ||
        cells.size() != static_cast<size_t>(rows) * cols) {
      throw std::logic_error("PayoffTable: dimension mismatch");
    }
    for (const PayoffCell& cell : cells) {
      if (cell.rollouts < 0) {
        throw std::logic_error("PayoffTable: negative rollout count");
      }
      if (cell.rollouts > 0 && !std::isfinite(cell.value)) {
        throw std::logic_error("PayoffTable: non-finite filled cell");
      }
    }
  }

  // The restricted normal-form game; requires every cell filled.
  MatrixGame to_matrix() const {
    if (!complete()) {
      throw std::logic_error("PayoffTable: to_matrix before all cells filled");
    }
    MatrixGame game;
    game.rows = rows;
    game.cols = cols;
    game.u.reserve(cells.size());
    for (const PayoffCell& cell : cells) game.u.push_back(cell.value);
    game.check_valid();
    return game;
  }
};

// --- Payoff entries ---------------------------------------------------------

using BrCache = std::map<Theta, BrEstimate>;

// Scores one (policy, theta) restricted-game cell under `objective`. The
// br_cache must hold theta's best-response estimate for the farr and regret
// objectives; minimax needs no cache.
inline double payoff_entry(Env& env, Objective objective,
                           const TabularPolicy& policy, const Theta& theta,
                           const BrCache& br_cache, double lambda,
                           double penalty_c, int rollouts, Seed seed) {
  const UtilityEstimate est =
      estimate_utility(env, theta, policy, rollouts, seed);
  if (objective == Objective::kMinimax) return est.mean;
  const auto it = br_cache.find(theta);
  if (it == br_cache.end()) {
    throw std::invalid_argument(
        "payoff_entry: no best-response estimate cached for theta " +
        theta_label(theta));
  }
  const double br_value = it->second.value;
  if (objective == Objective::kFarr) {
    return farr_utility(est.mean, br_value, lambda, penalty_c);
  }
  return est.mean - br_value;  // Regret; <= 0 up to estimation noise.
}

// --- Engine state -----------------------------------------------------------

struct PsroState {
  Objective objective = Objective::kFarr;
  std::vector<TabularPolicy> protagonist_population;
  std::vector<Theta> adversary_population;
  PayoffTable payoff;
  BrCache br_cache;
  // Restricted NE over the populations, padded with exact zeros for members
  // added after the solve, so its dimensions always match the populations.
  MixedPair restricted_ne;
  int iteration = 0;
  // Last solve hit the FARR degenerate case: every adversary population
  // member infeasible, payoff constant at C, NE tie-broken to the uniform
  // adversary mixture and the most recent protagonist policy.
  bool all_infeasible = false;
  // Adversary space exhausted and the latest best response duplicated an
  // existing population member: no novel policy can be added.
  bool exhausted_no_novelty = false;

  void check_valid() const {
    if (protagonist_population.empty() || adversary_population.empty()) {
      throw std::logic_error("PsroState: populations must be nonempty");
    }
    if (payoff.rows != static_cast<int>(protagonist_population.size()) ||
        payoff.cols != static_cast<int>(adversary_population.size())) {
      throw std::logic_error("PsroState: payoff dimensions do not match "
                             "population sizes");
    }
    payoff.check_valid();
    const bool has_ne = !restricted_ne.row_dist.empty();
    if (has_ne) {
      if (restricted_ne.row_dist.size() != protagonist_population.size() ||
          restricted_ne.col_dist.size() != adversary_population.size()) {
        throw std::logic_error("PsroState: restricted NE dimensions do not "
                               "match population sizes");
      }
      for (const double w : restricted_ne.row_dist) {
        if (!(w >= 0.0)) throw std::logic_error("PsroState: negative NE mass");
      }
      for (const double w : restricted_ne.col_dist) {
        if (!(w >= 0.0)) throw std::logic_error("PsroState: negative NE mass");
      }
    } else if (!restricted_ne.col_dist.empty()) {
      throw std::logic_error("PsroState: half-empty restricted NE");
    }
    if (objective != Objective::kMinimax) {
      for (const Theta& theta : adversary_population) {
        if (br_cache.find(theta) == br_cache.end()) {
          throw std::logic_error(
              "PsroState: br_cache missing theta " + theta_label(theta));
        }
      }
    }
  }
};

namespace detail {

inline bool same_policy(const TabularPolicy& a, const TabularPolicy& b) {
  return a.observation_count == b.observation_count &&
         a.action_count == b.action_count &&
         a.time_dependent == b.time_dependent && a.horizon == b.horizon &&
         a.table == b.table;
}

// First k elements of a uniform random permutation of `pool` (partial
// Fisher-Yates); order of the returned sample is the draw order.
inline std::vector<Theta> sample_without_replacement(std::vector<Theta> pool,
                                                     int k, Rng& rng) {
  const int n = static_cast<int>(pool.size());
  k = std::min(k, n);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<size_t>(i)],
              pool[static_cast<size_t>(pick(rng))]);
  }
  pool.resize(static_cast<size_t>(k));
  return pool;
}

// Grid members not yet in the adversary population, in grid order.
inline std::vector<Theta> unused_thetas(const Env& env,
                                        const PsroState& state) {
  const std::set<Theta> used(state.adversary_population.begin(),
                             state.adversary_population.end());
  std::vector<Theta> unused;
  for (const Theta& theta : env.spec().theta_space.grid) {
    if (used.find(theta) == used.end()) unused.push_back(theta);
  }
  return unused;
}

inline int cell_rollouts(const Env& env, const PsroConfig& config) {
  return env.deterministic_dynamics() ? config.rollouts_deterministic
                                      : config.rollouts_stochastic;
}

// Evaluates every unfilled payoff cell. Each cell derives its seed from the
// run seed and its (row, col) indices only, so values never depend on the
// iteration that filled them, the objective, or the thread count.
inline void fill_missing_cells(PsroState& state, Env& env,
                               const PsroConfig& config, Seed run_seed) {
  std::vector<std::pair<int, int>> jobs;
  for (int i = 0; i < state.payoff.rows; ++i) {
    for (int j = 0; j < state.payoff.cols; ++j) {
      if (state.payoff.at(i, j).rollouts == 0) jobs.emplace_back(i, j);
    }
  }
  const int rollouts = cell_rollouts(env, config);
  parallel_for(
      static_cast<int>(jobs.size()), config.threads, [&](int k) {
        const auto [i, j] = jobs[static_cast<size_t>(k)];
        const Seed cell_seed = derive_seed(run_seed, "payoff",
                                           static_cast<Seed>(i),
                                           static_cast<Seed>(j));
        const std::unique_ptr<Env> local = env.clone();
        PayoffCell& cell = state.payoff.at(i, j);
        cell.value = payoff_entry(*local, state.objective,
                                  state.protagonist_population[i],
                                  state.adversary_population[j],
                                  state.br_cache, config.lambda,
                                  config.penalty_c, rollouts, cell_seed);
        cell.rollouts = rollouts;
        cell.seed = cell_seed;
      });
}

// Appends new adversary strategies and, when the objective needs them,
// their best-response estimates. Estimate seeds depend only on theta, so a
// theta's estimate is identical no matter when (or under which objective)
// it joins the population.
inline void add_thetas(PsroState& state, Env& env, const PsroConfig& config,
                       const std::vector<Theta>& new_thetas, Seed run_seed) {
  if (state.objective != Objective::kMinimax) {
    std::vector<BrEstimate> estimates(new_thetas.size());
    parallel_for(
        static_cast<int>(new_thetas.size()), config.threads, [&](int k) {
          const Theta& theta = new_thetas[static_cast<size_t>(k)];
          const std::unique_ptr<Env> local = env.clone();
          estimates[static_cast<size_t>(k)] = estimate_br_value(
              *local, theta, config.br,
              derive_seed(run_seed, "br_theta", theta_seed_label(theta)));
        });
    for (size_t k = 0; k < new_thetas.size(); ++k) {
      state.br_cache[new_thetas[k]] = estimates[k];
    }
  }
  state.adversary_population.insert(state.adversary_population.end(),
                                    new_thetas.begin(), new_thetas.end());
}

// Best response to the adversary mixture sigma_theta (support of col_dist
// over the adversary population), via the configured method.
inline TabularPolicy protagonist_br(PsroState& state, Env& env,
                                    const PsroConfig& config, Seed run_seed) {
  std::vector<Theta> thetas;
  std::vector<double> weights;
  for (size_t j = 0; j < state.adversary_population.size(); ++j) {
    const double w = state.restricted_ne.col_dist[j];
    if (w > 0.0) {
      thetas.push_back(state.adversary_population[j]);
      weights.push_back(w);
    }
  }
  if (config.br.method == BrMethod::kExact) {
    return value_iteration_br_mixture(env, thetas, weights).policy;
  }
  return q_learning_br_mixture(
      env, thetas, weights, config.br.ql_budget, config.br.ql,
      derive_seed(run_seed, "br_protagonist",
                  static_cast<Seed>(state.iteration)));
}

}  // namespace detail

// --- Restricted-game meta-solver --------------------------------------------

// NE of the restricted game: iterated elimination of strictly dominated
// strategies first (under the FARR objective this removes every infeasible
// column exactly whenever a feasible one exists), fictitious play on the
// reduced game, then lifting with exact zeros for eliminated strategies.
inline MixedPair meta_solve(const MatrixGame& game, long long fp_iterations) {
  const IesdsResult reduction = iesds_reduce(game);
  const MixedPair inner = fictitious_play(reduction.reduced, fp_iterations);
  MixedPair lifted;
  lifted.row_dist.assign(static_cast<size_t>(game.rows), 0.0);
  lifted.col_dist.assign(static_cast<size_t>(game.cols), 0.0);
  for (size_t k = 0; k < reduction.kept_rows.size(); ++k) {
    lifted.row_dist[static_cast<size_t>(reduction.kept_rows[k])] =
        inner.row_dist[k];
  }
  for (size_t k = 0; k < reduction.kept_cols.size(); ++k) {
    lifted.col_dist[static_cast<size_t>(reduction.kept_cols[k])] =
        inner.col_dist[k];
  }
  lifted.game_value = inner.game_value;
  return lifted;
}

// --- Initialization and iteration -------------------------------------------

// Fresh engine state: one uniformly random deterministic protagonist policy,
// `initial_thetas` adversary strategies sampled uniformly without replacement
// from the grid, best-response cache where the objective needs it, and a
// fully evaluated payoff table.
inline PsroState psro_init(Env& env, Objective objective,
                           const PsroConfig& config, Seed seed) {
  config.check_valid();
  if (!(config.penalty_c > env.max_return())) {
    throw std::invalid_argument(
        "psro_init: penalty_c must exceed the environment's max return");
  }
  PsroState state;
  state.objective = objective;

  const UpomdpSpec& spec = env.spec();
  Rng policy_rng = make_rng(derive_seed(seed, "init_policy"));
  state.protagonist_population.push_back(TabularPolicy::random_deterministic(
      policy_rng, spec.observation_count, spec.action_count));

  if (spec.theta_space.grid.empty()) {
    throw std::invalid_argument("psro_init: environment has an empty theta "
                                "grid");
  }
  Rng theta_rng = make_rng(derive_seed(seed, "init_thetas"));
  const std::vector<Theta> initial = detail::sample_without_replacement(
      spec.theta_space.grid, config.initial_thetas, theta_rng);
  detail::add_thetas(state, env, config, initial, seed);

  state.payoff.grow(1, static_cast<int>(state.adversary_population.size()));
  detail::fill_missing_cells(state, env, config, seed);
  state.check_valid();
  return state;
}

// One population-growth step:
//   (a) restricted NE of the current payoff table (meta_solve), or the
//       flagged uniform/most-recent tie-break when the FARR adversary
//       population is entirely infeasible;
//   (b) new protagonist policy: best response to sigma_theta;
//   (c) up to thetas_per_iteration new adversary strategies, sampled
//       uniformly without replacement from the unused grid (an exhausted
//       grid adds none and protagonist growth continues);
//   (d) best-response estimates for the new thetas (farr and regret);
//   (e) every missing payoff cell evaluated; iteration incremented.
// If the grid is exhausted and the best response duplicates an existing
// population member, the state is returned unchanged except for the
// exhausted_no_novelty flag and iteration count.
inline PsroState psro_iterate(PsroState state, Env& env,
                              const PsroConfig& config, Seed seed) {
  config.check_valid();
  state.check_valid();
  if (!state.payoff.complete()) {
    throw std::logic_error("psro_iterate: payoff table has unfilled cells");
  }
  const int pre_rows = state.payoff.rows;
  const int pre_cols = state.payoff.cols;

  // (a) Restricted NE.
  bool degenerate = false;
  if (state.objective == Objective::kFarr) {
    degenerate = true;
    for (const Theta& theta : state.adversary_population) {
      if (state.br_cache.at(theta).value >= config.lambda) {
        degenerate = false;
        break;
      }
    }
  }
  if (degenerate) {
    state.restricted_ne.row_dist.assign(static_cast<size_t>(pre_rows), 0.0);
    state.restricted_ne.row_dist.back() = 1.0;
    state.restricted_ne.col_dist.assign(static_cast<size_t>(pre_cols),
                                        1.0 / pre_cols);
    state.restricted_ne.game_value = config.penalty_c;
    state.all_infeasible = true;
  } else {
    state.restricted_ne = meta_solve(state.payoff.to_matrix(),
                                     config.fp_iterations);
    state.all_infeasible = false;
  }

  // (b) Protagonist best response to sigma_theta.
  TabularPolicy new_policy = detail::protagonist_br(state, env, config, seed);
  bool novel = true;
  for (const TabularPolicy& existing : state.protagonist_population) {
    if (detail::same_policy(existing, new_policy)) {
      novel = false;
      break;
    }
  }

  // (c) New adversary strategies.
  const std::vector<Theta> unused = detail::unused_thetas(env, state);
  if (unused.empty() && !novel) {
    state.exhausted_no_novelty = true;
    ++state.iteration;
    return state;
  }
  Rng theta_rng = make_rng(
      derive_seed(seed, "thetas", static_cast<Seed>(state.iteration)));
  const std::vector<Theta> sampled = detail::sample_without_replacement(
      unused, config.thetas_per_iteration, theta_rng);

  state.protagonist_population.push_back(std::move(new_policy));
  // (d) Evaluator best responses for the newcomers.
  detail::add_thetas(state, env, config, sampled, seed);

  // (e) Fill the grown payoff table.
  state.payoff.grow(static_cast<int>(state.protagonist_population.size()),
                    static_cast<int>(state.adversary_population.size()));
  detail::fill_missing_cells(state, env, config, seed);

  // Keep the NE aligned with the grown populations: exact zeros for members
  // that were not part of the solved game.
  state.restricted_ne.row_dist.resize(state.protagonist_population.size(),
                                      0.0);
  state.restricted_ne.col_dist.resize(state.adversary_population.size(), 0.0);
  ++state.iteration;
  state.check_valid();
  return state;
}

// --- Full runs and metrics --------------------------------------------------

struct IterationMetrics {
  int iteration = 0;
  double worst_case_feasible = 0.0;  // min over feasible theta of mean return.
  Theta argmin_theta;                // Theta attaining the minimum.
  double exploitability = 0.0;       // Of the NE on the game it solved.
  double restricted_value = 0.0;     // Restricted-game value at the NE.
  int protagonist_count = 0;         // Population sizes after the iteration.
  int adversary_count = 0;
  std::vector<Theta> adversary_thetas;  // Population snapshot...
  std::vector<double> sigma_theta;      // ...and the NE mass on each member.
  bool all_infeasible = false;
};

struct PsroRunResult {
  PsroState state;
  std::vector<IterationMetrics> history;
  FeasibleSet eval_set;  // Feasibility classification behind the metric.
};

// Runs the engine to the iteration cap (or until no novel policy can be
// added), recording per-iteration metrics. The worst-case metric needs a
// feasibility classification of the grid: pass one in `eval_feasible` (its
// lambda must match the config), or leave it null to compute one here with
// the exact best-response oracle. Every seed stream is independent of the
// objective, so two objectives whose payoffs coincide (for example farr and
// minimax when every theta is feasible) produce identical histories.
inline PsroRunResult run_psro(Env& env, Objective objective,
                              const PsroConfig& config, Seed seed,
                              const FeasibleSet* eval_feasible = nullptr) {
  config.check_valid();
  PsroRunResult out;
  if (eval_feasible != nullptr) {
    if (eval_feasible->lambda != config.lambda) {
      throw std::invalid_argument(
          "run_psro: eval feasible set lambda does not match config");
    }
    out.eval_set = *eval_feasible;
  } else {
    BrConfig exact;
    exact.method = BrMethod::kExact;
    out.eval_set =
        build_feasible_set(env, config.lambda, env.spec().theta_space.grid,
                           exact, derive_seed(seed, "eval_feasible"));
  }
  if (out.eval_set.feasible_count() == 0) {
    throw std::invalid_argument(
        "run_psro: no feasible theta at this lambda; the worst-case metric "
        "is undefined");
  }

  PsroState state = psro_init(env, objective, config, seed);
  for (int it = 0; it < config.iterations; ++it) {
    const MatrixGame solved_game = state.payoff.to_matrix();
    state = psro_iterate(std::move(state), env, config, seed);

    IterationMetrics m;
    m.iteration = state.iteration;
    m.all_infeasible = state.all_infeasible;
    m.restricted_value = state.restricted_ne.game_value;
    // Exploitability of the solve on the game it actually solved: the NE
    // padding added after growth is sliced back off.
    MixedPair solved;
    solved.row_dist.assign(state.restricted_ne.row_dist.begin(),
                           state.restricted_ne.row_dist.begin() +
                               solved_game.rows);
    solved.col_dist.assign(state.restricted_ne.col_dist.begin(),
                           state.restricted_ne.col_dist.begin() +
                               solved_game.cols);
    solved.game_value = state.restricted_ne.game_value;
    m.exploitability = exploitability(solved_game, solved);

    PolicyMixture sigma_p;
    for (size_t i = 0; i < state.protagonist_population.size(); ++i) {
      const double w = state.restricted_ne.row_dist[i];
      if (w > 0.0) {
        sigma_p.policies.push_back(state.protagonist_population[i]);
        sigma_p.weights.push_back(w);
      }
    }
    const WorstCaseResult wc = worst_case_feasible_reward(
        sigma_p, out.eval_set, env, config.eval_episodes,
        derive_seed(seed, "metric", static_cast<Seed>(m.iteration)));
    m.worst_case_feasible = wc.value;
    m.argmin_theta = wc.theta;

    m.protagonist_count = static_cast<int>(state.protagonist_population.size());
    m.adversary_count = static_cast<int>(state.adversary_population.size());
    m.adversary_thetas = state.adversary_population;
    m.sigma_theta = state.restricted_ne.col_dist;
    out.history.push_back(std::move(m));
    if (state.exhausted_no_novelty) break;
  }
  out.state = std::move(state);
  return out;
}

// --- Domain randomization baseline ------------------------------------------

// Single best response to the uniform mixture over `thetas` (no population,
// no game): exact mixture value iteration or Q-learning with theta resampled
// per episode, per the configured method.
inline TabularPolicy domain_randomization_train(Env& env,
                                                const std::vector<Theta>&
                                                    thetas,
                                                const BrConfig& config,
                                                Seed seed) {
  config.check_valid();
  if (thetas.empty()) {
    throw std::invalid_argument("domain_randomization_train: empty theta set");
  }
  const std::vector<double> weights(thetas.size(),
                                    1.0 / static_cast<double>(thetas.size()));
  if (config.method == BrMethod::kExact) {
    return value_iteration_br_mixture(env, thetas, weights).policy;
  }
  return q_learning_br_mixture(env, thetas, weights, config.ql_budget,
                               config.ql, derive_seed(seed, "dr_train"));
}

// --- Metric serialization ---------------------------------------------------

inline void write_metrics_csv(std::ostream& out,
                              const std::vector<IterationMetrics>& history,
                              const std::string& objective_label) {
  out << "iteration,objective,worst_case_feasible_reward,argmin_theta,"
         "exploitability,restricted_value,protagonist_count,adversary_count,"
         "all_infeasible\n";
  for (const IterationMetrics& m : history) {
    out << m.iteration << ',' << objective_label << ','
        << format_double(m.worst_case_feasible) << ','
        << theta_label(m.argmin_theta) << ','
        << format_double(m.exploitability) << ','
        << format_double(m.restricted_value) << ',' << m.protagonist_count
        << ',' << m.adversary_count << ',' << (m.all_infeasible ? 1 : 0)
        << '\n';
  }
}

inline void write_metrics_csv(std::ostream& out,
                              const std::vector<IterationMetrics>& history,
                              Objective objective) {
  write_metrics_csv(out, history, objective_name(objective));
}

inline void write_sigma_theta_csv(std::ostream& out,
                                  const std::vector<IterationMetrics>&
                                      history) {
  out << "iteration,theta,probability\n";
  for (const IterationMetrics& m : history) {
    for (size_t k = 0; k < m.adversary_thetas.size(); ++k) {
      out << m.iteration << ',' << theta_label(m.adversary_thetas[k]) << ','
          << format_double(m.sigma_theta[k]) << '\n';
    }
  }
}

}  // namespace farr
