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
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "farr/strings.hpp"

// Finite two-player zero-sum normal-form games.
//
// The row player (protagonist) maximizes the matrix entry u[i][j]; the column
// player (adversary) receives -u[i][j] and therefore minimizes u. On top of
// the basic solver (fictitious play) and quality metric (exploitability),
// this header implements the feasibility transform: columns whose
// best-response value falls below a threshold lambda have all payoffs
// replaced by a large constant C, which makes them strictly dominated for the
// adversary and hence eliminable, reducing the transformed game to the
// original game restricted to feasible columns.

namespace farr {

struct MatrixGame {
  int rows = 0;
  int cols = 0;
  std::vector<double> u;  // Row-major, rows * cols entries.
  std::vector<std::string> row_labels;  // Empty, or one label per row.
  std::vector<std::string> col_labels;  // Empty, or one label per column.

  double at(int i, int j) const { return u[static_cast<size_t>(i) * cols + j]; }
  double& at(int i, int j) { return u[static_cast<size_t>(i) * cols + j]; }

  static MatrixGame from_rows(const std::vector<std::vector<double>>& rows_in,
                              std::vector<std::string> row_labels = {},
                              std::vector<std::string> col_labels = {}) {
    MatrixGame g;
    g.rows = static_cast<int>(rows_in.size());
    g.cols = g.rows > 0 ? static_cast<int>(rows_in[0].size()) : 0;
    for (const auto& row : rows_in) {
      if (static_cast<int>(row.size()) != g.cols) {
        throw std::invalid_argument("MatrixGame: ragged row lengths");
      }
      g.u.insert(g.u.end(), row.begin(), row.end());
    }
    g.row_labels = std::move(row_labels);
    g.col_labels = std::move(col_labels);
    g.check_valid();
    return g;
  }

  void check_valid() const {
    if (rows < 1 || cols < 1) {
      throw std::invalid_argument("MatrixGame: rows and cols must be >= 1");
    }
    if (u.size() != static_cast<size_t>(rows) * cols) {
      throw std::invalid_argument("MatrixGame: entry count mismatch");
    }
    for (const double x : u) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("MatrixGame: entries must be finite");
      }
    }
    if (!row_labels.empty() && static_cast<int>(row_labels.size()) != rows) {
      throw std::invalid_argument("MatrixGame: row label count mismatch");
    }
    if (!col_labels.empty() && static_cast<int>(col_labels.size()) != cols) {
      throw std::invalid_argument("MatrixGame: col label count mismatch");
    }
  }

  double max_entry() const { return *std::max_element(u.begin(), u.end()); }
  double min_entry() const { return *std::min_element(u.begin(), u.end()); }
};

// A mixed-strategy profile plus the row player's expected utility under it.
struct MixedPair {
  std::vector<double> row_dist;
  std::vector<double> col_dist;
  double game_value = 0.0;
};

namespace detail {

inline int argmax_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline int argmin_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

inline void check_dist_size(const std::vector<double>& dist, int n,
                            const char* what) {
  if (static_cast<int>(dist.size()) != n) {
    throw std::invalid_argument(std::string("dimension mismatch for ") + what);
  }
}

}  // namespace detail

// Value of each pure row against col_dist: (u * col_dist)[i].
inline std::vector<double> row_pure_values(const MatrixGame& game,
                                           const std::vector<double>& col_dist) {
  detail::check_dist_size(col_dist, game.cols, "col_dist");
  std::vector<double> out(game.rows, 0.0);
  for (int i = 0; i < game.rows; ++i) {
    double acc = 0.0;
    for (int j = 0; j < game.cols; ++j) acc += game.at(i, j) * col_dist[j];
    out[i] = acc;
  }
  return out;
}

// Row player's utility of each pure column against row_dist: (row_dist^T u)[j].
// The adversary picks the minimizer of these.
inline std::vector<double> col_pure_values(const MatrixGame& game,
                                           const std::vector<double>& row_dist) {
  detail::check_dist_size(row_dist, game.rows, "row_dist");
  std::vector<double> out(game.cols, 0.0);
  for (int j = 0; j < game.cols; ++j) {
    double acc = 0.0;
    for (int i = 0; i < game.rows; ++i) acc += game.at(i, j) * row_dist[i];
    out[j] = acc;
  }
  return out;
}

inline double expected_value(const MatrixGame& game,
                             const std::vector<double>& row_dist,
                             const std::vector<double>& col_dist) {
  const std::vector<double> row_values = row_pure_values(game, col_dist);
  double acc = 0.0;
  for (int i = 0; i < game.rows; ++i) acc += row_dist[i] * row_values[i];
  return acc;
}

// Alternating fictitious play. Iteration 1 plays (row 0, col 0); at every
// later iteration the row player best-responds to the column player's
// empirical frequencies so far, then the column player best-responds to the
// row player's frequencies including the row's current move. Ties break
// toward the lowest index. Returned frequencies are exact rationals with
// denominator = iterations. (The alternating update converges markedly
// faster than the simultaneous one in practice, which the exploitability
// tests rely on.)
inline MixedPair fictitious_play(const MatrixGame& game, long long iterations) {
  game.check_valid();
  if (iterations < 1) {
    throw std::invalid_argument("fictitious_play: iterations must be >= 1");
  }
  std::vector<long long> row_counts(game.rows, 0);
  std::vector<long long> col_counts(game.cols, 0);
  // Running sums of pure-strategy payoffs vs the opponent's play counts:
  // row_acc[i] = sum over past opponent plays c of u[i][c], and likewise
  // col_acc[j] = sum over past row plays r of u[r][j]. Dividing by the play
  // count would give values vs empirical frequencies; argmax/argmin are
  // unaffected by the normalization.
  std::vector<double> row_acc(game.rows, 0.0);
  std::vector<double> col_acc(game.cols, 0.0);
  int r = 0;
  int c = 0;
  for (long long t = 0; t < iterations; ++t) {
    if (t > 0) r = detail::argmax_lowest(row_acc);
    ++row_counts[r];
    for (int j = 0; j < game.cols; ++j) col_acc[j] += game.at(r, j);
    if (t > 0) c = detail::argmin_lowest(col_acc);
    ++col_counts[c];
    for (int i = 0; i < game.rows; ++i) row_acc[i] += game.at(i, c);
  }
  MixedPair out;
  out.row_dist.resize(game.rows);
  out.col_dist.resize(game.cols);
  for (int i = 0; i < game.rows; ++i) {
    out.row_dist[i] = static_cast<double>(row_counts[i]) / iterations;
  }
  for (int j = 0; j < game.cols; ++j) {
    out.col_dist[j] = static_cast<double>(col_counts[j]) / iterations;
  }
  out.game_value = expected_value(game, out.row_dist, out.col_dist);
  return out;
}

// Sum of both players' best unilateral improvements:
//   (max_i (u col_dist)_i) - (min_j (row_dist^T u)_j).
// Nonnegative; zero exactly at a Nash equilibrium.
inline double exploitability(const MatrixGame& game, const MixedPair& pair) {
  game.check_valid();
  const std::vector<double> row_values = row_pure_values(game, pair.col_dist);
  const std::vector<double> col_values = col_pure_values(game, pair.row_dist);
  return *std::max_element(row_values.begin(), row_values.end()) -
         *std::min_element(col_values.begin(), col_values.end());
}

inline std::vector<bool> feasible_columns(const std::vector<double>& br_values,
                                          double lambda) {
  std::vector<bool> mask(br_values.size());
  for (size_t j = 0; j < br_values.size(); ++j) {
    mask[j] = br_values[j] >= lambda;  // Boundary counts as feasible.
  }
  return mask;
}

// Feasibility transform: every column whose best-response value falls below
// lambda has all entries replaced by penalty_c; feasible columns (br >= lambda)
// are untouched. penalty_c must strictly exceed every entry of every feasible
// column — that is the "sufficiently large C" condition under which penalized
// columns become strictly dominated for the adversary. (Checking feasible
// columns only, rather than the whole matrix, keeps the transform idempotent:
// re-applying it to its own output is a no-op.)
inline MatrixGame farr_transform(const MatrixGame& game,
                                 const std::vector<double>& br_values,
                                 double lambda, double penalty_c) {
  game.check_valid();
  detail::check_dist_size(br_values, game.cols, "br_values");
  if (!std::isfinite(lambda) || !std::isfinite(penalty_c)) {
    throw std::invalid_argument("farr_transform: lambda and penalty_c must be finite");
  }
  const std::vector<bool> feasible = feasible_columns(br_values, lambda);
  for (int j = 0; j < game.cols; ++j) {
    if (!feasible[j]) continue;
    for (int i = 0; i < game.rows; ++i) {
      if (!(penalty_c > game.at(i, j))) {
        throw std::invalid_argument(
            "farr_transform: penalty_c must strictly exceed every "
            "feasible-column utility (got " + format_double(penalty_c) +
            " vs entry " + format_double(game.at(i, j)) + ")");
      }
    }
  }
  MatrixGame out = game;
  for (int j = 0; j < game.cols; ++j) {
    if (feasible[j]) continue;
    for (int i = 0; i < game.rows; ++i) out.at(i, j) = penalty_c;
  }
  return out;
}

// Restriction of a game to a subset of columns (original order preserved).
inline MatrixGame restrict_columns(const MatrixGame& game,
                                   const std::vector<int>& kept_cols) {
  game.check_valid();
  if (kept_cols.empty()) {
    throw std::invalid_argument("restrict_columns: kept_cols must be nonempty");
  }
  MatrixGame out;
  out.rows = game.rows;
  out.cols = static_cast<int>(kept_cols.size());
  out.u.resize(static_cast<size_t>(out.rows) * out.cols);
  for (int i = 0; i < out.rows; ++i) {
    for (int k = 0; k < out.cols; ++k) {
      const int j = kept_cols[k];
      if (j < 0 || j >= game.cols) {
        throw std::invalid_argument("restrict_columns: index out of range");
      }
      out.at(i, k) = game.at(i, j);
    }
  }
  out.row_labels = game.row_labels;
  if (!game.col_labels.empty()) {
    for (const int j : kept_cols) out.col_labels.push_back(game.col_labels[j]);
  }
  return out;
}

struct IesdsResult {
  MatrixGame reduced;
  std::vector<int> removed_rows;  // Original indices, in elimination order.
  std::vector<int> removed_cols;  // Original indices, in elimination order.
  std::vector<int> kept_rows;     // Original indices, ascending.
  std::vector<int> kept_cols;     // Original indices, ascending.
};

// Iterated elimination of strictly dominated pure strategies; dominance is
// strict entrywise with no epsilon (ties block elimination). Rows are
// dominated when another row is strictly larger everywhere; columns when
// another column is strictly smaller everywhere (the adversary minimizes u).
// Scans rows before columns and restarts after each removal; for generic
// games the surviving set is order-independent (strict IESDS is
// order-independent), only the removal *order* depends on the scan.
inline IesdsResult iesds_reduce(const MatrixGame& game) {
  game.check_valid();
  std::vector<int> live_rows(game.rows);
  std::vector<int> live_cols(game.cols);
  for (int i = 0; i < game.rows; ++i) live_rows[i] = i;
  for (int j = 0; j < game.cols; ++j) live_cols[j] = j;
  IesdsResult result;

  auto row_dominated = [&](int victim) {
    for (const int dominator : live_rows) {
      if (dominator == victim) continue;
      bool strict = true;
      for (const int j : live_cols) {
        if (!(game.at(dominator, j) > game.at(victim, j))) {
          strict = false;
          break;
        }
      }
      if (strict) return true;
    }
    return false;
  };
  auto col_dominated = [&](int victim) {
    for (const int dominator : live_cols) {
      if (dominator == victim) continue;
      bool strict = true;
      for (const int i : live_rows) {
        if (!(game.at(i, dominator) < game.at(i, victim))) {
          strict = false;
          break;
        }
      }
      if (strict) return true;
    }
    return false;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    if (live_rows.size() > 1) {
      for (size_t k = 0; k < live_rows.size(); ++k) {
        if (row_dominated(live_rows[k])) {
          result.removed_rows.push_back(live_rows[k]);
          live_rows.erase(live_rows.begin() + k);
          changed = true;
          break;
        }
      }
    }
    if (changed) continue;
    if (live_cols.size() > 1) {
      for (size_t k = 0; k < live_cols.size(); ++k) {
        if (col_dominated(live_cols[k])) {
          result.removed_cols.push_back(live_cols[k]);
          live_cols.erase(live_cols.begin() + k);
          changed = true;
          break;
        }
      }
    }
  }

  result.kept_rows = live_rows;
  result.kept_cols = live_cols;
  MatrixGame reduced;
  reduced.rows = static_cast<int>(live_rows.size());
  reduced.cols = static_cast<int>(live_cols.size());
  reduced.u.resize(static_cast<size_t>(reduced.rows) * reduced.cols);
  for (int a = 0; a < reduced.rows; ++a) {
    for (int b = 0; b < reduced.cols; ++b) {
      reduced.at(a, b) = game.at(live_rows[a], live_cols[b]);
    }
  }
  if (!game.row_labels.empty()) {
    for (const int i : live_rows) reduced.row_labels.push_back(game.row_labels[i]);
  }
  if (!game.col_labels.empty()) {
    for (const int j : live_cols) reduced.col_labels.push_back(game.col_labels[j]);
  }
  result.reduced = std::move(reduced);
  return result;
}

// Checks the reduction theorem numerically on one instance: an approximate NE
// of the transformed game must (a) put at most `tol` mass on penalized
// columns and (b) restrict+renormalize to an approximate NE (exploitability
// <= tol) of the original game restricted to feasible columns.
inline bool verify_theorem1(const MatrixGame& game,
                            const std::vector<double>& br_values,
                            double lambda, double penalty_c, double tol,
                            long long fp_iterations = 100000) {
  game.check_valid();
  detail::check_dist_size(br_values, game.cols, "br_values");
  const std::vector<bool> feasible = feasible_columns(br_values, lambda);
  std::vector<int> feasible_indices;
  for (int j = 0; j < game.cols; ++j) {
    if (feasible[j]) feasible_indices.push_back(j);
  }
  if (feasible_indices.empty()) {
    throw std::invalid_argument(
        "verify_theorem1: feasible column set must be nonempty");
  }

  const MatrixGame transformed =
      farr_transform(game, br_values, lambda, penalty_c);
  const MixedPair pair = fictitious_play(transformed, fp_iterations);

  double infeasible_mass = 0.0;
  double feasible_mass = 0.0;
  for (int j = 0; j < game.cols; ++j) {
    if (feasible[j]) {
      feasible_mass += pair.col_dist[j];
    } else {
      infeasible_mass += pair.col_dist[j];
    }
  }
  if (infeasible_mass > tol) return false;
  if (!(feasible_mass > 0.0)) return false;

  const MatrixGame reduced = restrict_columns(game, feasible_indices);
  MixedPair restricted;
  restricted.row_dist = pair.row_dist;
  restricted.col_dist.reserve(feasible_indices.size());
  for (const int j : feasible_indices) {
    restricted.col_dist.push_back(pair.col_dist[j] / feasible_mass);
  }
  restricted.game_value =
      expected_value(reduced, restricted.row_dist, restricted.col_dist);
  return exploitability(reduced, restricted) <= tol;
}

// --- Plain-text matrix format ---------------------------------------------
//
//   <rows> <cols>
//   u[0][0] ... u[0][cols-1]
//   ...
//   u[rows-1][0] ... u[rows-1][cols-1]
//   row <i> <name>      (optional, any subset, any order)
//   col <j> <name>      (optional)

inline void write_matrix(std::ostream& out, const MatrixGame& game) {
  game.check_valid();
  out << game.rows << ' ' << game.cols << '\n';
  for (int i = 0; i < game.rows; ++i) {
    for (int j = 0; j < game.cols; ++j) {
      if (j > 0) out << ' ';
      out << format_double(game.at(i, j));
    }
    out << '\n';
  }
  for (int i = 0; i < static_cast<int>(game.row_labels.size()); ++i) {
    out << "row " << i << ' ' << game.row_labels[i] << '\n';
  }
  for (int j = 0; j < static_cast<int>(game.col_labels.size()); ++j) {
    out << "col " << j << ' ' << game.col_labels[j] << '\n';
  }
}

inline std::string format_matrix(const MatrixGame& game) {
  std::ostringstream out;
  write_matrix(out, game);
  return out.str();
}

inline MatrixGame parse_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("parse_matrix: empty input");
  }
  const std::vector<std::string> header = split_ws(line);
  if (header.size() != 2) {
    throw std::invalid_argument("parse_matrix: header must be '<rows> <cols>'");
  }
  MatrixGame game;
  game.rows = static_cast<int>(parse_int_strict(header[0], "rows"));
  game.cols = static_cast<int>(parse_int_strict(header[1], "cols"));
  if (game.rows < 1 || game.cols < 1) {
    throw std::invalid_argument("parse_matrix: rows and cols must be >= 1");
  }
  game.u.reserve(static_cast<size_t>(game.rows) * game.cols);
  for (int i = 0; i < game.rows; ++i) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("parse_matrix: missing matrix row " +
                                  std::to_string(i));
    }
    const std::vector<std::string> tokens = split_ws(line);
    if (static_cast<int>(tokens.size()) != game.cols) {
      throw std::invalid_argument("parse_matrix: row " + std::to_string(i) +
                                  " has wrong entry count");
    }
    for (const std::string& token : tokens) {
      game.u.push_back(parse_double_strict(token, "matrix entry"));
    }
  }
  while (std::getline(in, line)) {
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::vector<std::string> tokens = split_ws(trimmed);
    if (tokens.size() < 3 || (tokens[0] != "row" && tokens[0] != "col")) {
      throw std::invalid_argument("parse_matrix: bad label line: " + trimmed);
    }
    const bool is_row = tokens[0] == "row";
    const int count = is_row ? game.rows : game.cols;
    const int index = static_cast<int>(parse_int_strict(tokens[1], "label index"));
    if (index < 0 || index >= count) {
      throw std::invalid_argument("parse_matrix: label index out of range");
    }
    auto& labels = is_row ? game.row_labels : game.col_labels;
    labels.resize(count);
    std::string name = tokens[2];
    for (size_t k = 3; k < tokens.size(); ++k) name += " " + tokens[k];
    labels[index] = name;
  }
  game.check_valid();
  return game;
}

inline MatrixGame parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix(in);
}

}  // namespace farr
