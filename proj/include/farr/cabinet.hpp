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

#include <vector>

#include "farr/matrix_game.hpp"

// The cabinet retrieval game: a robot decides whether to attempt grabbing a
// bowl; its adversary decides which of three cabinets the bowl goes in. The
// left cabinet is easy (utility 2 on a grab), the middle is harder (1), and
// the right cabinet is locked: a grab attempt fails badly (-10), and even an
// optimal policy scores 0 there, below the feasibility threshold of 1. With
// feasibility enforced, the equilibrium flips from "never grab / anywhere"
// to "grab / middle".

namespace farr {

inline constexpr double kCabinetLambda = 1.0;
inline constexpr double kCabinetPenaltyC = 500.0;

inline MatrixGame canonical_cabinet_game() {
  return MatrixGame::from_rows({{2.0, 1.0, -10.0}, {0.0, 0.0, 0.0}},
                               {"grab", "don't-grab"},
                               {"left", "middle", "locked-right"});
}

// Per-column best-response values (column maxes: the protagonist picks the
// row, so BR(theta) for a column is its best entry).
inline std::vector<double> cabinet_br_values() { return {2.0, 1.0, 0.0}; }

}  // namespace farr
