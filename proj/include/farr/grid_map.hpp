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

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "farr/upomdp.hpp"

// ASCII grid maps: 'S' start (exactly one), '.' floor, 'L' lava.

namespace farr {

enum class Cell { kFloor, kLava };

struct GridMap {
  int height = 0;
  int width = 0;
  std::vector<Cell> cells;  // Row-major.
  int start_row = 0;
  int start_col = 0;

  bool in_bounds(int r, int c) const {
    return r >= 0 && r < height && c >= 0 && c < width;
  }
  int index(int r, int c) const { return r * width + c; }
  Cell at(int r, int c) const { return cells[index(r, c)]; }
  bool is_lava(int r, int c) const { return at(r, c) == Cell::kLava; }
  bool is_start(int r, int c) const {
    return r == start_row && c == start_col;
  }

  // Every cell except the start is a legal goal (lava cells included).
  std::vector<GridGoal> legal_goals() const {
    std::vector<GridGoal> goals;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        if (!is_start(r, c)) goals.push_back({r, c});
      }
    }
    return goals;
  }

  int lava_count() const {
    int n = 0;
    for (const Cell cell : cells) n += cell == Cell::kLava ? 1 : 0;
    return n;
  }

  std::string to_text() const {
    std::string out;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        out += is_start(r, c) ? 'S' : (is_lava(r, c) ? 'L' : '.');
      }
      out += '\n';
    }
    return out;
  }
};

// Parses a rectangular ASCII map over {S, ., L}; whitespace-only lines are
// skipped, spaces inside a line are ignored (maps may be written with
// column gaps for readability).
inline GridMap load_map(const std::string& text) {
  GridMap map;
  std::istringstream in(text);
  std::string line;
  int starts = 0;
  while (std::getline(in, line)) {
    std::string row;
    for (const char ch : line) {
      if (ch == ' ' || ch == '\t' || ch == '\r') continue;
      row += ch;
    }
    if (row.empty()) continue;
    if (map.width == 0) {
      map.width = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != map.width) {
      throw std::invalid_argument("load_map: non-rectangular rows");
    }
    for (int c = 0; c < map.width; ++c) {
      switch (row[c]) {
        case '.':
          map.cells.push_back(Cell::kFloor);
          break;
        case 'L':
          map.cells.push_back(Cell::kLava);
          break;
        case 'S':
          map.cells.push_back(Cell::kFloor);
          map.start_row = map.height;
          map.start_col = c;
          ++starts;
          break;
        default:
          throw std::invalid_argument(
              std::string("load_map: bad character '") + row[c] + "'");
      }
    }
    ++map.height;
  }
  if (map.height == 0) throw std::invalid_argument("load_map: empty map");
  if (starts != 1) {
    throw std::invalid_argument("load_map: need exactly one start, got " +
                                std::to_string(starts));
  }
  if (map.height * map.width < 2) {
    throw std::invalid_argument("load_map: no legal goal cells");
  }
  return map;
}

inline GridMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_map_file: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_map(buffer.str());
}

}  // namespace farr
