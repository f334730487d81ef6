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
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "farr/rng.hpp"
#include "farr/strings.hpp"

namespace farr {

// A tabular stochastic policy: one action distribution per observation id.
// Stationary by default; with `time_dependent` set, the table holds one block
// of observation rows per timestep (plans produced by finite-horizon dynamic
// programming are time-indexed).
struct TabularPolicy {
  int observation_count = 0;
  int action_count = 0;
  bool time_dependent = false;
  int horizon = 1;  // Number of timestep blocks when time_dependent.
  std::vector<double> table;  // (rows x action_count) row-major.
  std::string metadata;  // Provenance: trained-on theta/mixture, budget, etc.

  int row_count() const {
    return observation_count * (time_dependent ? horizon : 1);
  }

  int row_index(int obs, int t) const {
    if (obs < 0 || obs >= observation_count) {
      throw std::out_of_range("TabularPolicy: observation out of range");
    }
    if (!time_dependent) return obs;
    if (t < 0) throw std::out_of_range("TabularPolicy: negative timestep");
    // Steps past the planned horizon reuse the final block; finite-horizon
    // plans never get queried there, but rollouts with longer horizons stay
    // well-defined.
    const int tt = t < horizon ? t : horizon - 1;
    return tt * observation_count + obs;
  }

  std::span<const double> action_distribution(int obs, int t) const {
    return std::span<const double>(
        table.data() + static_cast<size_t>(row_index(obs, t)) * action_count,
        static_cast<size_t>(action_count));
  }

  int sample_action(Rng& rng, int obs, int t) const {
    return sample_index(rng, action_distribution(obs, t));
  }

  // True when every row is a point mass (rollouts need no action randomness).
  bool deterministic() const {
    for (size_t r = 0; r < table.size() / action_count; ++r) {
      for (int a = 0; a < action_count; ++a) {
        const double p = table[r * action_count + a];
        if (p != 0.0 && p != 1.0) return false;
      }
    }
    return true;
  }

  void check_valid() const {
    if (observation_count < 1 || action_count < 1 || horizon < 1) {
      throw std::invalid_argument("TabularPolicy: bad dimensions");
    }
    if (table.size() !=
        static_cast<size_t>(row_count()) * static_cast<size_t>(action_count)) {
      throw std::invalid_argument("TabularPolicy: table size mismatch");
    }
    for (size_t r = 0; r < static_cast<size_t>(row_count()); ++r) {
      double sum = 0.0;
      for (int a = 0; a < action_count; ++a) {
        const double p = table[r * action_count + a];
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw std::invalid_argument("TabularPolicy: bad probability");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("TabularPolicy: row does not sum to 1");
      }
    }
  }

  static TabularPolicy uniform(int observation_count, int action_count) {
    TabularPolicy p;
    p.observation_count = observation_count;
    p.action_count = action_count;
    p.table.assign(
        static_cast<size_t>(observation_count) * action_count,
        1.0 / action_count);
    p.check_valid();
    return p;
  }

  // Deterministic policy from one action per observation (stationary form).
  static TabularPolicy from_actions(const std::vector<int>& actions,
                                    int action_count) {
    TabularPolicy p;
    p.observation_count = static_cast<int>(actions.size());
    p.action_count = action_count;
    p.table.assign(static_cast<size_t>(actions.size()) * action_count, 0.0);
    for (size_t o = 0; o < actions.size(); ++o) {
      if (actions[o] < 0 || actions[o] >= action_count) {
        throw std::invalid_argument("TabularPolicy: action out of range");
      }
      p.table[o * action_count + actions[o]] = 1.0;
    }
    p.check_valid();
    return p;
  }

  // Deterministic time-indexed plan: actions[t][obs].
  static TabularPolicy from_plan(const std::vector<std::vector<int>>& plan,
                                 int observation_count, int action_count) {
    TabularPolicy p;
    p.observation_count = observation_count;
    p.action_count = action_count;
    p.time_dependent = true;
    p.horizon = static_cast<int>(plan.size());
    p.table.assign(static_cast<size_t>(p.row_count()) * action_count, 0.0);
    for (int t = 0; t < p.horizon; ++t) {
      if (static_cast<int>(plan[t].size()) != observation_count) {
        throw std::invalid_argument("TabularPolicy: plan row size mismatch");
      }
      for (int o = 0; o < observation_count; ++o) {
        const int a = plan[t][o];
        if (a < 0 || a >= action_count) {
          throw std::invalid_argument("TabularPolicy: action out of range");
        }
        p.table[(static_cast<size_t>(t) * observation_count + o) *
                    action_count + a] = 1.0;
      }
    }
    p.check_valid();
    return p;
  }

  // Uniformly random deterministic stationary policy (population seeding).
  static TabularPolicy random_deterministic(Rng& rng, int observation_count,
                                            int action_count) {
    std::vector<int> actions(observation_count);
    for (int o = 0; o < observation_count; ++o) {
      actions[o] = static_cast<int>(rng() % action_count);
    }
    return from_actions(actions, action_count);
  }
};

// --- Serialization ----------------------------------------------------------
// Text format, round-trip exact via %.17g:
//   policy <observation_count> <action_count> <time_dependent> <horizon>
//   <one line of action_count probabilities per table row>
//   metadata <free text>            (optional, single line)

inline void write_policy(std::ostream& out, const TabularPolicy& policy) {
  policy.check_valid();
  out << "policy " << policy.observation_count << ' ' << policy.action_count
      << ' ' << (policy.time_dependent ? 1 : 0) << ' ' << policy.horizon
      << '\n';
  for (int r = 0; r < policy.row_count(); ++r) {
    for (int a = 0; a < policy.action_count; ++a) {
      if (a > 0) out << ' ';
      out << format_double(
          policy.table[static_cast<size_t>(r) * policy.action_count + a]);
    }
    out << '\n';
  }
  if (!policy.metadata.empty()) {
    std::string flat = policy.metadata;
    for (char& c : flat) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    out << "metadata " << flat << '\n';
  }
}

inline std::string format_policy(const TabularPolicy& policy) {
  std::ostringstream out;
  write_policy(out, policy);
  return out.str();
}

inline TabularPolicy parse_policy(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("parse_policy: empty input");
  }
  const std::vector<std::string> header = split_ws(line);
  if (header.size() != 5 || header[0] != "policy") {
    throw std::invalid_argument(
        "parse_policy: header must be 'policy <obs> <actions> "
        "<time_dependent> <horizon>'");
  }
  TabularPolicy policy;
  policy.observation_count =
      static_cast<int>(parse_int_strict(header[1], "observation_count"));
  policy.action_count =
      static_cast<int>(parse_int_strict(header[2], "action_count"));
  const long long flag = parse_int_strict(header[3], "time_dependent");
  if (flag != 0 && flag != 1) {
    throw std::invalid_argument("parse_policy: time_dependent must be 0 or 1");
  }
  policy.time_dependent = flag == 1;
  policy.horizon = static_cast<int>(parse_int_strict(header[4], "horizon"));
  if (policy.observation_count < 1 || policy.action_count < 1 ||
      policy.horizon < 1) {
    throw std::invalid_argument("parse_policy: counts must be >= 1");
  }
  const int rows = policy.row_count();
  policy.table.reserve(static_cast<size_t>(rows) * policy.action_count);
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("parse_policy: missing table row " +
                                  std::to_string(r));
    }
    const std::vector<std::string> tokens = split_ws(line);
    if (static_cast<int>(tokens.size()) != policy.action_count) {
      throw std::invalid_argument("parse_policy: row " + std::to_string(r) +
                                  " has wrong entry count");
    }
    for (const std::string& token : tokens) {
      policy.table.push_back(parse_double_strict(token, "policy entry"));
    }
  }
  while (std::getline(in, line)) {
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.rfind("metadata", 0) == 0) {
      policy.metadata = trim(trimmed.substr(8));
      continue;
    }
    throw std::invalid_argument("parse_policy: unexpected trailing line '" +
                                trimmed + "'");
  }
  policy.check_valid();
  return policy;
}

inline TabularPolicy parse_policy_text(const std::string& text) {
  std::istringstream in(text);
  return parse_policy(in);
}

}  // namespace farr
