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

// Batch command-line front end. Subcommands:
//   run           execute the (objective x lambda x seed) experiment grid
//   feasible-set  classify the whole theta grid at one lambda, write CSV
//   matrix-demo   print the cabinet-game before/after equilibrium report
//   eval          score a saved policy against a saved feasible set
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "farr/experiment.hpp"

namespace {

farr::ExperimentConfig load_with_overrides(
    const std::string& config_path,
    const std::vector<std::string>& overrides) {
  farr::ExperimentConfig config =
      farr::load_experiment_config(config_path);
  for (const std::string& assignment : overrides) {
    farr::apply_config_override(config, assignment);
  }
  return config;
}

void write_file_or_throw(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Robust-RL experiment harness: population-based training against an "
      "environment-designing adversary, with feasibility constraints"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::int64_t seed_value = 0;
  std::string out_path;
  int threads_value = 1;
  double lambda_value = 0.0;
  std::int64_t fp_iterations = 2000;
  std::string policy_path;
  std::string set_path;
  int episodes = 100;

  CLI::App* run = app.add_subcommand(
      "run", "Run every configured (objective, lambda, seed) job");
  run->add_option("--config", config_path, "Config file path")->required();
  run->add_option("--set", overrides,
                  "Override a config key, e.g. --set psro.iterations=5");
  CLI::Option* run_seed =
      run->add_option("--seed", seed_value, "Replace run.seeds with one seed");
  CLI::Option* run_out =
      run->add_option("--out", out_path, "Replace run.output_dir");
  CLI::Option* run_threads =
      run->add_option("--threads", threads_value, "Replace psro.threads");

  CLI::App* feasible = app.add_subcommand(
      "feasible-set",
      "Classify every theta on the grid at one lambda and write the CSV");
  feasible->add_option("--config", config_path, "Config file path")
      ->required();
  feasible->add_option("--set", overrides, "Override a config key");
  CLI::Option* feasible_lambda = feasible->add_option(
      "--lambda", lambda_value, "Threshold (default: first of run.lambdas)");
  CLI::Option* feasible_seed = feasible->add_option(
      "--seed", seed_value, "Estimate seed (default: first of run.seeds)");
  feasible->add_option("--out", out_path, "Output CSV path")
      ->default_val("feasible_set.csv");

  CLI::App* demo = app.add_subcommand(
      "matrix-demo", "Print the cabinet-game equilibrium report");
  demo->add_option("--fp-iterations", fp_iterations,
                   "Fictitious-play iterations")
      ->default_val(2000);

  CLI::App* eval = app.add_subcommand(
      "eval", "Score a saved policy against a saved feasible set");
  eval->add_option("--config", config_path,
                   "Config file path (selects the environment)")
      ->required();
  eval->add_option("--set", overrides, "Override a config key");
  eval->add_option("--policy", policy_path, "Policy file to score")
      ->required();
  eval->add_option("--feasible-set", set_path, "Feasible-set CSV")
      ->required();
  eval->add_option("--episodes", episodes, "Evaluation episodes per theta")
      ->default_val(100);
  eval->add_option("--seed", seed_value, "Evaluation seed")->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      farr::ExperimentConfig config =
          load_with_overrides(config_path, overrides);
      if (run_seed->count() > 0) {
        if (seed_value < 0) throw farr::ConfigError("--seed must be >= 0");
        config.seeds = {static_cast<farr::Seed>(seed_value)};
      }
      if (run_out->count() > 0) config.output_dir = out_path;
      if (run_threads->count() > 0) config.threads = threads_value;
      const farr::ExperimentResult result =
          farr::run_experiment(config, &std::cout);
      std::cout << result.jobs.size() << " job(s) written under "
                << config.output_dir << '\n';
      return 0;
    }

    if (feasible->parsed()) {
      farr::ExperimentConfig config =
          load_with_overrides(config_path, overrides);
      config.check_valid();
      const double lambda = feasible_lambda->count() > 0
                                ? lambda_value
                                : config.lambdas.front();
      farr::Seed seed = config.seeds.front();
      if (feasible_seed->count() > 0) {
        if (seed_value < 0) throw farr::ConfigError("--seed must be >= 0");
        seed = static_cast<farr::Seed>(seed_value);
      }
      std::unique_ptr<farr::Env> env = farr::make_env(config);
      const farr::FeasibleSetSummary summary =
          farr::build_feasible_set_summary(*env, lambda, config.br, seed);
      write_file_or_throw(out_path, farr::feasible_set_csv(summary.set));
      std::cout << "lambda " << farr::format_double(lambda) << ": "
                << summary.feasible_count << " feasible / "
                << summary.infeasible_count << " infeasible of "
                << summary.set.records.size() << " parameter(s) -> "
                << out_path << '\n';
      return 0;
    }

    if (demo->parsed()) {
      farr::print_matrix_demo(std::cout,
                              farr::run_matrix_demo(fp_iterations));
      return 0;
    }

    if (eval->parsed()) {
      farr::ExperimentConfig config =
          load_with_overrides(config_path, overrides);
      config.check_valid();
      std::ifstream policy_in(policy_path);
      if (!policy_in) {
        throw farr::ConfigError("cannot read policy file '" + policy_path +
                                "'");
      }
      const farr::TabularPolicy policy = farr::parse_policy(policy_in);
      std::ifstream set_in(set_path);
      if (!set_in) {
        throw farr::ConfigError("cannot read feasible-set file '" +
                                set_path + "'");
      }
      const farr::FeasibleSet set = farr::parse_feasible_set_csv(set_in);
      std::unique_ptr<farr::Env> env = farr::make_env(config);
      const farr::WorstCaseResult wc = farr::worst_case_feasible_reward(
          policy, set, *env, episodes,
          static_cast<farr::Seed>(seed_value));
      std::cout << "worst-case feasible reward "
                << farr::format_double(wc.value) << " at "
                << farr::theta_label(wc.theta) << " (threshold "
                << farr::format_double(set.lambda) << ", "
                << (wc.value >= set.lambda ? "met" : "not met") << ")\n";
      if (!policy.metadata.empty()) {
        std::cout << "policy metadata: " << policy.metadata << '\n';
      }
      return 0;
    }
  } catch (const farr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
