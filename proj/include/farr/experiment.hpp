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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "farr/br_estimate.hpp"
#include "farr/cabinet.hpp"
#include "farr/feasibility.hpp"
#include "farr/grid_map.hpp"
#include "farr/lava_world.hpp"
#include "farr/matrix_game.hpp"
#include "farr/policy.hpp"
#include "farr/psro.hpp"
#include "farr/rng.hpp"
#include "farr/strings.hpp"
#include "farr/upomdp.hpp"
#include "farr/windy_walk.hpp"

// Batch experiment harness: a line-oriented `key = value` configuration
// format, environment construction, the cabinet-game demonstration report,
// and the orchestration loop that runs every (objective, lambda, seed)
// combination into its own output directory.

namespace farr {

// Configuration problems (unreadable file, bad syntax, unknown key, value
// out of range). The CLI maps this to its config-error exit code; anything
// else that escapes is a runtime failure.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The full experiment description. Defaults reproduce a small Lava World
// run; shipped config files override them. `objectives` holds the names
// "farr", "minimax", "regret", and "dr" -- the first three run the
// population engine, "dr" trains the domain-randomization baseline once per
// seed and evaluates it against each lambda's feasible set.
struct ExperimentConfig {
  std::string env_name = "lavaworld";  // env.name: lavaworld | windywalk
  std::string map_file;                // env.map_file: empty = built-in map

  std::vector<std::string> objectives = {"farr", "minimax", "regret", "dr"};
  std::vector<double> lambdas = {-10.0};
  double penalty_c = 50.0;
  std::vector<Seed> seeds = {1};
  std::string output_dir = "farr_out";

  int iterations = 25;
  int fp_iterations = 2000;
  int initial_thetas = 3;
  int thetas_per_iteration = 3;
  int rollouts_deterministic = 1;
  int rollouts_stochastic = 100;
  int eval_episodes = 100;
  int threads = 1;

  BrConfig br;

  // Structural validation only; the penalty-vs-max-return precondition
  // needs the environment and is checked by check_penalty_for_env.
  void check_valid() const {
    if (env_name != "lavaworld" && env_name != "windywalk") {
      throw ConfigError("env.name: unknown environment '" + env_name +
                        "' (expected lavaworld or windywalk)");
    }
    if (env_name != "lavaworld" && !map_file.empty()) {
      throw ConfigError("env.map_file: only lavaworld loads a map file");
    }
    if (objectives.empty()) {
      throw ConfigError("run.objectives: need at least one objective");
    }
    std::set<std::string> seen_objectives;
    for (const std::string& name : objectives) {
      if (name != "farr" && name != "minimax" && name != "regret" &&
          name != "dr") {
        throw ConfigError("run.objectives: unknown objective '" + name +
                          "' (expected farr, minimax, regret, or dr)");
      }
      if (!seen_objectives.insert(name).second) {
        throw ConfigError("run.objectives: duplicate objective '" + name +
                          "'");
      }
    }
    if (lambdas.empty()) {
      throw ConfigError("run.lambdas: need at least one lambda");
    }
    std::set<double> seen_lambdas;
    for (const double lambda : lambdas) {
      if (!std::isfinite(lambda)) {
        throw ConfigError("run.lambdas: lambda must be finite");
      }
      if (!seen_lambdas.insert(lambda).second) {
        throw ConfigError("run.lambdas: duplicate lambda " +
                          format_double(lambda));
      }
    }
    if (!std::isfinite(penalty_c)) {
      throw ConfigError("run.penalty_c: must be finite");
    }
    if (seeds.empty()) throw ConfigError("run.seeds: need at least one seed");
    std::set<Seed> seen_seeds;
    for (const Seed seed : seeds) {
      if (!seen_seeds.insert(seed).second) {
        throw ConfigError("run.seeds: duplicate seed " +
                          std::to_string(seed));
      }
    }
    if (output_dir.empty()) {
      throw ConfigError("run.output_dir: must not be empty");
    }
    if (iterations < 1) throw ConfigError("psro.iterations: must be >= 1");
    if (fp_iterations < 1) {
      throw ConfigError("psro.fp_iterations: must be >= 1");
    }
    if (initial_thetas < 1) {
      throw ConfigError("psro.initial_thetas: must be >= 1");
    }
    if (thetas_per_iteration < 1) {
      throw ConfigError("psro.thetas_per_iteration: must be >= 1");
    }
    if (rollouts_deterministic < 1) {
      throw ConfigError("psro.rollouts_deterministic: must be >= 1");
    }
    if (rollouts_stochastic < 1) {
      throw ConfigError("psro.rollouts_stochastic: must be >= 1");
    }
    if (eval_episodes < 1) {
      throw ConfigError("psro.eval_episodes: must be >= 1");
    }
    if (threads < 1) throw ConfigError("psro.threads: must be >= 1");
    try {
      br.check_valid();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("br: ") + e.what());
    }
  }

  // Assembles the engine configuration for one lambda.
  PsroConfig psro_config(double lambda) const {
    PsroConfig config;
    config.lambda = lambda;
    config.penalty_c = penalty_c;
    config.iterations = iterations;
    config.fp_iterations = fp_iterations;
    config.initial_thetas = initial_thetas;
    config.thetas_per_iteration = thetas_per_iteration;
    config.rollouts_deterministic = rollouts_deterministic;
    config.rollouts_stochastic = rollouts_stochastic;
    config.eval_episodes = eval_episodes;
    config.threads = threads;
    config.br = br;
    return config;
  }
};

namespace detail {

inline int config_to_int(long long value, const std::string& key) {
  if (value < std::numeric_limits<int>::min() ||
      value > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": value out of range");
  }
  return static_cast<int>(value);
}

inline std::vector<std::string> config_list(const std::string& value,
                                            const std::string& key) {
  std::vector<std::string> items;
  for (const std::string& raw : split_on(value, ',')) {
    const std::string item = trim(raw);
    if (item.empty()) {
      throw ConfigError(key + ": empty list entry in '" + value + "'");
    }
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError(key + ": empty list");
  return items;
}

}  // namespace detail

// Applies one `key = value` assignment. Unknown keys are rejected with the
// offending path so typos never silently fall back to defaults.
inline void apply_config_key(ExperimentConfig& config, const std::string& key,
                             const std::string& value) {
  try {
    if (key == "env.name") {
      config.env_name = value;
    } else if (key == "env.map_file") {
      config.map_file = value;
    } else if (key == "run.objectives") {
      config.objectives = detail::config_list(value, key);
    } else if (key == "run.lambdas") {
      config.lambdas.clear();
      for (const std::string& item : detail::config_list(value, key)) {
        config.lambdas.push_back(parse_double_strict(item, key));
      }
    } else if (key == "run.penalty_c") {
      config.penalty_c = parse_double_strict(value, key);
    } else if (key == "run.seeds") {
      config.seeds.clear();
      for (const std::string& item : detail::config_list(value, key)) {
        const long long seed = parse_int_strict(item, key);
        if (seed < 0) throw ConfigError(key + ": seeds must be >= 0");
        config.seeds.push_back(static_cast<Seed>(seed));
      }
    } else if (key == "run.output_dir") {
      config.output_dir = value;
    } else if (key == "psro.iterations") {
      config.iterations = detail::config_to_int(parse_int_strict(value, key),
                                                key);
    } else if (key == "psro.fp_iterations") {
      config.fp_iterations =
          detail::config_to_int(parse_int_strict(value, key), key);
    } else if (key == "psro.initial_thetas") {
      config.initial_thetas =
          detail::config_to_int(parse_int_strict(value, key), key);
    } else if (key == "psro.thetas_per_iteration") {
      config.thetas_per_iteration =
          detail::config_to_int(parse_int_strict(value, key), key);
    } else if (key == "psro.rollouts_deterministic") {
      config.rollouts_deterministic =
          detail::config_to_int(parse_int_strict(value, key), key);
    } else if (key == "psro.rollouts_stochastic") {
      config.rollouts_stochastic =
          detail::config_to_int(parse_int_strict(value, key), key);
    } else if (key == "psro.eval_episodes") {
      config.eval_episodes =
          detail::config_to_int(parse_int_strict(value, key), key);
    } else if (key == "psro.threads") {
      config.threads = detail::config_to_int(parse_int_strict(value, key),
                                             key);
    } else if (key == "br.method") {
      config.br.method = parse_br_method(value);
    } else if (key == "br.seeds") {
      config.br.seeds = detail::config_to_int(parse_int_strict(value, key),
                                              key);
    } else if (key == "br.eval_episodes") {
      config.br.eval_episodes =
          detail::config_to_int(parse_int_strict(value, key), key);
    } else if (key == "br.ql_budget") {
      config.br.ql_budget = parse_int_strict(value, key);
    } else if (key == "br.ql.learning_rate") {
      config.br.ql.learning_rate = parse_double_strict(value, key);
    } else if (key == "br.ql.epsilon_start") {
      config.br.ql.epsilon_start = parse_double_strict(value, key);
    } else if (key == "br.ql.epsilon_end") {
      config.br.ql.epsilon_end = parse_double_strict(value, key);
    } else if (key == "br.ql.epsilon_decay_steps") {
      config.br.ql.epsilon_decay_steps = parse_int_strict(value, key);
    } else if (key == "br.ql.q_init") {
      config.br.ql.q_init = parse_double_strict(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// Parses the line-oriented format: `key = value`, `#` starts a comment,
// blank lines ignored. A key may appear at most once per file; command-line
// overrides (apply_config_override) are the way to re-set one.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": missing key before '='");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": duplicate key '" + key + "'");
    }
    apply_config_key(config, key, value);
  }
  return config;
}

inline ExperimentConfig parse_experiment_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_experiment_config(in);
}

// Applies one `--set key=value` command-line override.
inline void apply_config_override(ExperimentConfig& config,
                                  const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment +
                      "' must have the form key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) {
    throw ConfigError("override '" + assignment + "': missing key");
  }
  apply_config_key(config, key, trim(assignment.substr(eq + 1)));
}

// Canonical snapshot: every key, fixed order, exact numeric round trip.
// parse_experiment_config_text(experiment_config_text(c)) reproduces c.
inline std::string experiment_config_text(const ExperimentConfig& config) {
  std::ostringstream out;
  const auto join_doubles = [](const std::vector<double>& values) {
    std::string joined;
    for (size_t i = 0; i < values.size(); ++i) {
      if (i > 0) joined += ',';
      joined += format_double(values[i]);
    }
    return joined;
  };
  std::string objectives;
  for (size_t i = 0; i < config.objectives.size(); ++i) {
    if (i > 0) objectives += ',';
    objectives += config.objectives[i];
  }
  std::string seeds;
  for (size_t i = 0; i < config.seeds.size(); ++i) {
    if (i > 0) seeds += ',';
    seeds += std::to_string(config.seeds[i]);
  }
  out << "env.name = " << config.env_name << '\n'
      << "env.map_file = " << config.map_file << '\n'
      << "run.objectives = " << objectives << '\n'
      << "run.lambdas = " << join_doubles(config.lambdas) << '\n'
      << "run.penalty_c = " << format_double(config.penalty_c) << '\n'
      << "run.seeds = " << seeds << '\n'
      << "run.output_dir = " << config.output_dir << '\n'
      << "psro.iterations = " << config.iterations << '\n'
      << "psro.fp_iterations = " << config.fp_iterations << '\n'
      << "psro.initial_thetas = " << config.initial_thetas << '\n'
      << "psro.thetas_per_iteration = " << config.thetas_per_iteration << '\n'
      << "psro.rollouts_deterministic = " << config.rollouts_deterministic
      << '\n'
      << "psro.rollouts_stochastic = " << config.rollouts_stochastic << '\n'
      << "psro.eval_episodes = " << config.eval_episodes << '\n'
      << "psro.threads = " << config.threads << '\n'
      << "br.method = " << br_method_name(config.br.method) << '\n'
      << "br.seeds = " << config.br.seeds << '\n'
      << "br.eval_episodes = " << config.br.eval_episodes << '\n'
      << "br.ql_budget = " << config.br.ql_budget << '\n'
      << "br.ql.learning_rate = " << format_double(config.br.ql.learning_rate)
      << '\n'
      << "br.ql.epsilon_start = " << format_double(config.br.ql.epsilon_start)
      << '\n'
      << "br.ql.epsilon_end = " << format_double(config.br.ql.epsilon_end)
      << '\n'
      << "br.ql.epsilon_decay_steps = " << config.br.ql.epsilon_decay_steps
      << '\n'
      << "br.ql.q_init = " << format_double(config.br.ql.q_init) << '\n';
  return out.str();
}

// --- Environment construction -----------------------------------------------

inline std::unique_ptr<Env> make_env(const ExperimentConfig& config) {
  config.check_valid();
  if (config.env_name == "lavaworld") {
    GridMap map = config.map_file.empty() ? load_map(default_lava_map_text())
                                          : load_map_file(config.map_file);
    return std::make_unique<LavaWorldEnv>(std::move(map));
  }
  return std::make_unique<WindyWalkEnv>();
}

// The penalty must exceed anything the protagonist can actually score;
// otherwise the penalized game does not implement the feasibility
// restriction and every downstream equilibrium claim is void.
inline void check_penalty_for_env(const ExperimentConfig& config,
                                  const Env& env) {
  if (!(config.penalty_c > env.max_return())) {
    throw ConfigError(
        "run.penalty_c: must exceed the environment's maximum achievable "
        "return (" + format_double(env.max_return()) + "), got " +
        format_double(config.penalty_c));
  }
}

// --- Cabinet-game demonstration ---------------------------------------------

// Before/after story on the cabinet game: the plain zero-sum equilibrium
// hides in "don't-grab" because the adversary can use the locked cabinet,
// while the penalized game prices the locked cabinet out and the
// equilibrium moves to grab / middle.
struct MatrixDemoReport {
  MatrixGame original;
  MatrixGame transformed;
  std::vector<double> br_values;
  MixedPair original_ne;
  MixedPair transformed_ne;
  double original_exploitability = 0.0;
  double transformed_exploitability = 0.0;
  IesdsResult reduction;  // Of the transformed game.
  bool restriction_equivalence = false;
  long long fp_iterations = 0;
};

inline MatrixDemoReport run_matrix_demo(long long fp_iterations = 2000) {
  MatrixDemoReport report;
  report.fp_iterations = fp_iterations;
  report.original = canonical_cabinet_game();
  report.br_values = cabinet_br_values();
  report.transformed = farr_transform(report.original, report.br_values,
                                      kCabinetLambda, kCabinetPenaltyC);
  report.original_ne = fictitious_play(report.original, fp_iterations);
  report.transformed_ne = fictitious_play(report.transformed, fp_iterations);
  report.original_exploitability =
      exploitability(report.original, report.original_ne);
  report.transformed_exploitability =
      exploitability(report.transformed, report.transformed_ne);
  report.reduction = iesds_reduce(report.transformed);
  report.restriction_equivalence =
      verify_theorem1(report.original, report.br_values, kCabinetLambda,
                      kCabinetPenaltyC, 0.05);
  return report;
}

namespace detail {

inline std::string fixed3(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

inline void print_game(std::ostream& out, const MatrixGame& game) {
  size_t label_width = 0;
  for (const std::string& label : game.row_labels) {
    label_width = std::max(label_width, label.size());
  }
  out << std::string(label_width + 2, ' ');
  for (int j = 0; j < game.cols; ++j) {
    out << ' ' << game.col_labels[j];
  }
  out << '\n';
  for (int i = 0; i < game.rows; ++i) {
    out << "  " << game.row_labels[i]
        << std::string(label_width - game.row_labels[i].size(), ' ');
    for (int j = 0; j < game.cols; ++j) {
      const std::string cell = fixed3(game.at(i, j));
      const size_t width = game.col_labels[j].size();
      out << ' '
          << std::string(width > cell.size() ? width - cell.size() : 0, ' ')
          << cell;
    }
    out << '\n';
  }
}

inline void print_dist(std::ostream& out, const std::vector<double>& dist,
                       const std::vector<std::string>& labels) {
  for (size_t i = 0; i < dist.size(); ++i) {
    if (i > 0) out << ", ";
    out << labels[i] << "=" << fixed3(dist[i]);
  }
}

}  // namespace detail

inline void print_matrix_demo(std::ostream& out,
                              const MatrixDemoReport& report) {
  out << "Cabinet game (rows: protagonist, columns: bowl placement)\n";
  detail::print_game(out, report.original);
  out << "Best response per placement: ";
  detail::print_dist(out, report.br_values, report.original.col_labels);
  out << "\nFeasibility threshold " << format_double(kCabinetLambda)
      << ": locked-right is infeasible (best response below threshold)\n\n";

  out << "Plain zero-sum equilibrium (fictitious play, "
      << report.fp_iterations << " iterations)\n  protagonist: ";
  detail::print_dist(out, report.original_ne.row_dist,
                     report.original.row_labels);
  out << "\n  adversary:   ";
  detail::print_dist(out, report.original_ne.col_dist,
                     report.original.col_labels);
  out << "\n  value " << detail::fixed3(report.original_ne.game_value)
      << ", exploitability "
      << detail::fixed3(report.original_exploitability) << "\n\n";

  out << "Feasibility-penalized game (penalty "
      << format_double(kCabinetPenaltyC) << " on infeasible placements)\n";
  detail::print_game(out, report.transformed);
  out << "Equilibrium\n  protagonist: ";
  detail::print_dist(out, report.transformed_ne.row_dist,
                     report.transformed.row_labels);
  out << "\n  adversary:   ";
  detail::print_dist(out, report.transformed_ne.col_dist,
                     report.transformed.col_labels);
  out << "\n  value " << detail::fixed3(report.transformed_ne.game_value)
      << ", exploitability "
      << detail::fixed3(report.transformed_exploitability) << "\n\n";

  out << "Dominance reduction of the penalized game keeps "
      << report.reduction.reduced.rows << " row(s) x "
      << report.reduction.reduced.cols << " column(s):";
  for (const int i : report.reduction.kept_rows) {
    out << ' ' << report.original.row_labels[i];
  }
  out << " /";
  for (const int j : report.reduction.kept_cols) {
    out << ' ' << report.original.col_labels[j];
  }
  out << '\n';
  out << "Penalized equilibrium equals the feasible-restricted equilibrium: "
      << (report.restriction_equivalence ? "PASS" : "FAIL") << '\n';
}

// --- Feasibility-grid summary -----------------------------------------------

struct FeasibleSetSummary {
  FeasibleSet set;
  int feasible_count = 0;
  int infeasible_count = 0;
};

inline FeasibleSetSummary build_feasible_set_summary(Env& env, double lambda,
                                                     const BrConfig& br,
                                                     Seed seed) {
  if (!std::isfinite(lambda)) {
    throw ConfigError("run.lambdas: lambda must be finite");
  }
  FeasibleSetSummary summary;
  summary.set = build_feasible_set(env, lambda, env.spec().theta_space.grid,
                                   br, seed);
  summary.feasible_count = summary.set.feasible_count();
  summary.infeasible_count =
      static_cast<int>(summary.set.records.size()) - summary.feasible_count;
  return summary;
}

// --- Experiment orchestration -----------------------------------------------

struct ExperimentJobResult {
  std::string objective;  // "farr", "minimax", "regret", or "dr".
  double lambda = 0.0;
  Seed seed = 0;
  std::string directory;
  std::vector<IterationMetrics> history;
};

struct ExperimentResult {
  std::vector<ExperimentJobResult> jobs;
  std::map<double, FeasibleSet> eval_sets;  // One per lambda, shared by jobs.
};

namespace detail {

inline std::string job_dir_name(const std::string& objective, double lambda,
                                Seed seed) {
  return objective + "_lambda" + format_double(lambda) + "_seed" +
         std::to_string(seed);
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("failed writing '" + path.string() + "'");
  }
}

// The single metrics row for the domain-randomization baseline: no
// population and no equilibrium, so exploitability is zero by definition,
// restricted_value is the trained policy's uniform-average return over the
// full theta grid, and the sigma_theta snapshot stays empty.
inline IterationMetrics dr_metrics(Env& env, const TabularPolicy& policy,
                                   const FeasibleSet& eval_set,
                                   const ExperimentConfig& config,
                                   Seed seed) {
  IterationMetrics m;
  m.iteration = 0;
  const PolicyMixture mixture = PolicyMixture::pure(policy);
  const WorstCaseResult wc =
      worst_case_feasible_reward(mixture, eval_set, env,
                                 config.eval_episodes,
                                 derive_seed(seed, "metric", Seed(0)));
  m.worst_case_feasible = wc.value;
  m.argmin_theta = wc.theta;
  m.exploitability = 0.0;
  const std::vector<Theta>& grid = env.spec().theta_space.grid;
  const int episodes = env.deterministic_dynamics()
                           ? config.rollouts_deterministic
                           : config.rollouts_stochastic;
  double total = 0.0;
  for (size_t k = 0; k < grid.size(); ++k) {
    total += estimate_mixture_utility(env, grid[k], mixture, episodes,
                                      derive_seed(seed, "dr_eval", Seed(k)))
                 .mean;
  }
  m.restricted_value = total / static_cast<double>(grid.size());
  m.protagonist_count = 1;
  m.adversary_count = static_cast<int>(grid.size());
  m.all_infeasible = false;
  return m;
}

// Saves the final protagonist mixture: every population weight, plus the
// highest-weight policy as a standalone file the eval subcommand can score.
inline void save_final_policy(const std::filesystem::path& dir,
                              const std::vector<TabularPolicy>& population,
                              const std::vector<double>& weights,
                              const std::string& objective, double lambda,
                              Seed seed) {
  std::ostringstream mixture_csv;
  mixture_csv << "policy_index,weight\n";
  size_t best = 0;
  for (size_t i = 0; i < population.size(); ++i) {
    mixture_csv << i << ',' << format_double(weights[i]) << '\n';
    if (weights[i] > weights[best]) best = i;
  }
  write_text_file(dir / "final_mixture.csv", mixture_csv.str());
  TabularPolicy policy = population[best];
  policy.metadata = "objective=" + objective + " lambda=" +
                    format_double(lambda) + " seed=" + std::to_string(seed) +
                    " weight=" + format_double(weights[best]);
  write_text_file(dir / "final_policy.txt", format_policy(policy));
}

}  // namespace detail

// Runs the whole (objective x lambda x seed) grid. Each job writes
// metrics.csv, sigma_theta.csv, feasible_set.csv, config.txt (a snapshot
// narrowed to that job, so snapshot + seed reproduce it exactly), and the
// final policy files into output_dir/<objective>_lambda<L>_seed<S>/. The
// evaluation feasible set is built once per lambda with the exact oracle
// and shared across jobs so every objective is scored against the same
// classification. The domain-randomization policy is trained once per seed
// (it does not depend on lambda) and re-evaluated per lambda.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       std::ostream* log = nullptr) {
  config.check_valid();
  std::unique_ptr<Env> env = make_env(config);
  check_penalty_for_env(config, *env);

  ExperimentResult result;
  BrConfig exact;
  exact.method = BrMethod::kExact;
  for (const double lambda : config.lambdas) {
    FeasibleSet set = build_feasible_set(
        *env, lambda, env->spec().theta_space.grid, exact,
        derive_seed(config.seeds.front(), "eval_feasible"));
    if (set.feasible_count() == 0) {
      throw ConfigError("run.lambdas: no feasible theta at lambda " +
                        format_double(lambda) +
                        "; the worst-case metric is undefined");
    }
    result.eval_sets.emplace(lambda, std::move(set));
  }

  const std::filesystem::path root(config.output_dir);
  std::filesystem::create_directories(root);
  std::map<Seed, TabularPolicy> dr_cache;

  for (const std::string& objective : config.objectives) {
    for (const double lambda : config.lambdas) {
      const FeasibleSet& eval_set = result.eval_sets.at(lambda);
      for (const Seed seed : config.seeds) {
        ExperimentJobResult job;
        job.objective = objective;
        job.lambda = lambda;
        job.seed = seed;
        const std::filesystem::path dir =
            root / detail::job_dir_name(objective, lambda, seed);
        std::filesystem::create_directories(dir);
        job.directory = dir.string();

        if (objective == "dr") {
          auto cached = dr_cache.find(seed);
          if (cached == dr_cache.end()) {
            cached = dr_cache
                         .emplace(seed, domain_randomization_train(
                                            *env,
                                            env->spec().theta_space.grid,
                                            config.br, seed))
                         .first;
          }
          const TabularPolicy& policy = cached->second;
          job.history.push_back(
              detail::dr_metrics(*env, policy, eval_set, config, seed));
          detail::save_final_policy(dir, {policy}, {1.0}, objective, lambda,
                                    seed);
        } else {
          const PsroRunResult run =
              run_psro(*env, parse_objective(objective),
                       config.psro_config(lambda), seed, &eval_set);
          job.history = run.history;
          detail::save_final_policy(dir, run.state.protagonist_population,
                                    run.state.restricted_ne.row_dist,
                                    objective, lambda, seed);
        }

        std::ostringstream metrics;
        write_metrics_csv(metrics, job.history, objective);
        detail::write_text_file(dir / "metrics.csv", metrics.str());
        std::ostringstream sigma;
        write_sigma_theta_csv(sigma, job.history);
        detail::write_text_file(dir / "sigma_theta.csv", sigma.str());
        detail::write_text_file(dir / "feasible_set.csv",
                                feasible_set_csv(eval_set));
        ExperimentConfig snapshot = config;
        snapshot.objectives = {objective};
        snapshot.lambdas = {lambda};
        snapshot.seeds = {seed};
        snapshot.output_dir = job.directory;
        detail::write_text_file(dir / "config.txt",
                                experiment_config_text(snapshot));

        if (log != nullptr) {
          const IterationMetrics& last = job.history.back();
          *log << "[" << objective << " lambda=" << format_double(lambda)
               << " seed=" << seed << "] " << job.history.size()
               << " iteration(s), final worst-case feasible reward "
               << format_double(last.worst_case_feasible) << " -> "
               << job.directory << '\n';
        }
        result.jobs.push_back(std::move(job));
      }
    }
  }
  return result;
}

}  // namespace farr
