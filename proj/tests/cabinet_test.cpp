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

#include "farr/cabinet.hpp"

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace farr {
namespace {

TEST(Cabinet, ShippedValues) {
  const MatrixGame g = canonical_cabinet_game();
  ASSERT_EQ(g.rows, 2);
  ASSERT_EQ(g.cols, 3);
  EXPECT_DOUBLE_EQ(g.at(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(g.at(0, 2), -10.0);
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(g.at(1, j), 0.0);
  EXPECT_EQ(g.row_labels,
            (std::vector<std::string>{"grab", "don't-grab"}));
  EXPECT_EQ(g.col_labels,
            (std::vector<std::string>{"left", "middle", "locked-right"}));
  // Middle is harder than left but both clear the threshold; the locked
  // cabinet does not.
  EXPECT_LT(g.at(0, 1), g.at(0, 0));
  EXPECT_DOUBLE_EQ(kCabinetLambda, 1.0);
  EXPECT_DOUBLE_EQ(kCabinetPenaltyC, 500.0);
}

TEST(Cabinet, BrValuesAreColumnMaxes) {
  const MatrixGame g = canonical_cabinet_game();
  const std::vector<double> br = cabinet_br_values();
  ASSERT_EQ(br.size(), 3u);
  for (int j = 0; j < 3; ++j) {
    EXPECT_DOUBLE_EQ(br[j], std::max(g.at(0, j), g.at(1, j)));
  }
}

TEST(Cabinet, FeasibilityVector) {
  const std::vector<bool> feasible =
      feasible_columns(cabinet_br_values(), kCabinetLambda);
  EXPECT_EQ(feasible, (std::vector<bool>{true, true, false}));
}

// The headline flip: without feasibility the protagonist gives up; with the
// locked cabinet penalized, the equilibrium is grab / middle at value 1.
TEST(Cabinet, EquilibriumFlipsUnderTransform) {
  const MatrixGame original = canonical_cabinet_game();
  const test::TwoRowSolution original_exact =
      test::exact_two_row_solve(original);
  EXPECT_DOUBLE_EQ(original_exact.value, 0.0);
  EXPECT_DOUBLE_EQ(original_exact.p_row0, 0.0);

  const MatrixGame transformed = farr_transform(
      original, cabinet_br_values(), kCabinetLambda, kCabinetPenaltyC);
  const test::TwoRowSolution transformed_exact =
      test::exact_two_row_solve(transformed);
  EXPECT_DOUBLE_EQ(transformed_exact.value, 1.0);
  EXPECT_DOUBLE_EQ(transformed_exact.p_row0, 1.0);

  const MixedPair pair = fictitious_play(transformed, 2000);
  EXPECT_GE(pair.row_dist[0], 0.98);  // grab
  EXPECT_GE(pair.col_dist[1], 0.98);  // middle
  EXPECT_NEAR(pair.game_value, 1.0, 0.02);
  EXPECT_LE(exploitability(transformed, pair), 0.02);

  EXPECT_TRUE(verify_theorem1(original, cabinet_br_values(), kCabinetLambda,
                              kCabinetPenaltyC, 0.05));
}

}  // namespace
}  // namespace farr
