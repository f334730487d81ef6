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

#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "farr/br_estimate.hpp"
#include "farr/strings.hpp"
#include "farr/upomdp.hpp"

// Feasibility machinery: a parameter theta is feasible at threshold lambda
// when the best achievable protagonist return against it is at least lambda.
// The adversary's utility flips to a large constant penalty on infeasible
// parameters, which is what keeps equilibria away from unwinnable
// environments. This header owns the threshold rule, the enumeration of a
// parameter grid into a feasibility table, and worst-case evaluation of a
// strategy over the feasible parameters.

namespace farr {

// The adversary-side utility: a feasible theta scores the protagonist's
// actual return; an infeasible one scores the penalty (so that, in the
// zero-sum game, offering infeasible environments is strictly bad for the
// adversary).
inline double farr_utility(double u_p, double br_value, double lambda,
                           double penalty_c) {
  return br_value < lambda ? penalty_c : u_p;
}

struct FeasibilityRecord {
  Theta theta;
  double br_value = 0.0;
  double br_std_error = 0.0;
  double lambda = 0.0;
  bool feasible = false;
};

struct FeasibleSet {
  double lambda = 0.0;
  std::vector<FeasibilityRecord> records;

  int feasible_count() const {
    int n = 0;
    for (const FeasibilityRecord& r : records) n += r.feasible ? 1 : 0;
    return n;
  }

  std::vector<Theta> feasible_thetas() const {
    std::vector<Theta> out;
    for (const FeasibilityRecord& r : records) {
      if (r.feasible) out.push_back(r.theta);
    }
    return out;
  }

  const FeasibilityRecord* find(const Theta& theta) const {
    for (const FeasibilityRecord& r : records) {
      if (r.theta == theta) return &r;
    }
    return nullptr;
  }

  void check_valid() const {
    std::set<Theta> seen;
    for (const FeasibilityRecord& r : records) {
      if (r.lambda != lambda) {
        throw std::invalid_argument("FeasibleSet: mixed lambda values");
      }
      if (r.feasible != (r.br_value >= lambda)) {
        throw std::invalid_argument("FeasibleSet: feasibility/threshold"
                                    " mismatch");
      }
      if (!seen.insert(r.theta).second) {
        throw std::invalid_argument("FeasibleSet: duplicate theta " +
                                    theta_label(r.theta));
      }
    }
  }
};

// Estimates the best-response value for every grid point and applies the
// threshold rule. Per-theta work is seeded by a stable label derived from
// the theta itself, so results are independent of grid order and of what
// else the surrounding run computes.
inline FeasibleSet build_feasible_set(Env& env, double lambda,
                                      const std::vector<Theta>& theta_grid,
                                      const BrConfig& br_config, Seed seed) {
  if (theta_grid.empty()) {
    throw std::invalid_argument("build_feasible_set: empty theta grid");
  }
  FeasibleSet set;
  set.lambda = lambda;
  for (const Theta& theta : theta_grid) {
    const BrEstimate est = estimate_br_value(
        env, theta, br_config, derive_seed(seed, theta_seed_label(theta)));
    FeasibilityRecord record;
    record.theta = theta;
    record.br_value = est.value;
    record.br_std_error = est.std_error;
    record.lambda = lambda;
    record.feasible = est.value >= lambda;
    set.records.push_back(record);
  }
  set.check_valid();
  return set;
}

struct WorstCaseResult {
  double value = 0.0;
  Theta theta;  // The minimizing feasible parameter (first on ties).
  std::vector<UtilityEstimate> per_theta;  // Aligned with feasible_thetas().
};

// Minimum expected return of a mixed strategy over the feasible parameters.
inline WorstCaseResult worst_case_feasible_reward(const PolicyMixture& mixture,
                                                  const FeasibleSet& set,
                                                  Env& env, int episodes = 100,
                                                  Seed seed = 0) {
  mixture.check_valid();
  const std::vector<Theta> feasible = set.feasible_thetas();
  if (feasible.empty()) {
    throw std::invalid_argument(
        "worst_case_feasible_reward: empty feasible set");
  }
  WorstCaseResult result;
  result.value = std::numeric_limits<double>::infinity();
  for (const Theta& theta : feasible) {
    const UtilityEstimate est = estimate_mixture_utility(
        env, theta, mixture, episodes,
        derive_seed(seed, theta_seed_label(theta)));
    result.per_theta.push_back(est);
    if (est.mean < result.value) {
      result.value = est.mean;
      result.theta = theta;
    }
  }
  return result;
}

inline WorstCaseResult worst_case_feasible_reward(const TabularPolicy& policy,
                                                  const FeasibleSet& set,
                                                  Env& env, int episodes = 100,
                                                  Seed seed = 0) {
  return worst_case_feasible_reward(PolicyMixture::pure(policy), set, env,
                                    episodes, seed);
}

// --- CSV serialization -------------------------------------------------------

// Columns: theta label, the two numeric theta fields, the estimated
// best-response value and its standard error, the threshold, and the 0/1
// feasibility call. Numeric formatting round-trips doubles exactly.
inline void write_feasible_set_csv(std::ostream& out, const FeasibleSet& set) {
  const bool grid_goals =
      !set.records.empty() &&
      std::holds_alternative<GridGoal>(set.records.front().theta);
  out << "theta," << (grid_goals ? "goal_row,goal_col" : "alpha,beta")
      << ",br_value,br_stderr,lambda,feasible\n";
  for (const FeasibilityRecord& r : set.records) {
    out << theta_label(r.theta) << ',';
    if (const auto* g = std::get_if<GridGoal>(&r.theta)) {
      out << g->row << ',' << g->col;
    } else {
      const auto& b = std::get<BetaParams>(r.theta);
      out << format_double(b.alpha) << ',' << format_double(b.beta);
    }
    out << ',' << format_double(r.br_value) << ','
        << format_double(r.br_std_error) << ',' << format_double(r.lambda)
        << ',' << (r.feasible ? 1 : 0) << '\n';
  }
}

inline std::string feasible_set_csv(const FeasibleSet& set) {
  std::ostringstream out;
  write_feasible_set_csv(out, set);
  return out.str();
}

// Inverse of write_feasible_set_csv; the %.17g fields reparse to the exact
// in-memory doubles, so a round trip is lossless and check_valid holds.
inline FeasibleSet parse_feasible_set_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("parse_feasible_set_csv: empty input");
  }
  bool grid_goals = false;
  if (line == "theta,goal_row,goal_col,br_value,br_stderr,lambda,feasible") {
    grid_goals = true;
  } else if (line != "theta,alpha,beta,br_value,br_stderr,lambda,feasible") {
    throw std::invalid_argument(
        "parse_feasible_set_csv: unrecognized header '" + line + "'");
  }
  FeasibleSet set;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_on(line, ',');
    if (fields.size() != 7) {
      throw std::invalid_argument(
          "parse_feasible_set_csv: row needs 7 fields, got '" + line + "'");
    }
    FeasibilityRecord record;
    if (grid_goals) {
      GridGoal goal;
      goal.row = static_cast<int>(parse_int_strict(fields[1], "goal_row"));
      goal.col = static_cast<int>(parse_int_strict(fields[2], "goal_col"));
      record.theta = goal;
    } else {
      BetaParams beta;
      beta.alpha = parse_double_strict(fields[1], "alpha");
      beta.beta = parse_double_strict(fields[2], "beta");
      record.theta = beta;
    }
    if (theta_label(record.theta) != fields[0]) {
      throw std::invalid_argument(
          "parse_feasible_set_csv: label '" + fields[0] +
          "' does not match the theta fields");
    }
    record.br_value = parse_double_strict(fields[3], "br_value");
    record.br_std_error = parse_double_strict(fields[4], "br_stderr");
    record.lambda = parse_double_strict(fields[5], "lambda");
    const long long flag = parse_int_strict(fields[6], "feasible");
    if (flag != 0 && flag != 1) {
      throw std::invalid_argument(
          "parse_feasible_set_csv: feasible must be 0 or 1");
    }
    record.feasible = flag == 1;
    set.records.push_back(std::move(record));
  }
  if (set.records.empty()) {
    throw std::invalid_argument("parse_feasible_set_csv: no records");
  }
  set.lambda = set.records.front().lambda;
  set.check_valid();
  return set;
}

inline FeasibleSet parse_feasible_set_csv_text(const std::string& text) {
  std::istringstream in(text);
  return parse_feasible_set_csv(in);
}

}  // namespace farr
