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

#include "farr/policy.hpp"

#include <vector>

#include "gtest/gtest.h"

namespace farr {
namespace {

TEST(TabularPolicy, UniformIsValidAndStochastic) {
  const TabularPolicy p = TabularPolicy::uniform(4, 3);
  EXPECT_NO_THROW(p.check_valid());
  EXPECT_FALSE(p.deterministic());
  const auto dist = p.action_distribution(2, 0);
  for (const double x : dist) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
}

TEST(TabularPolicy, FromActionsIsDeterministic) {
  const TabularPolicy p = TabularPolicy::from_actions({2, 0, 1}, 3);
  EXPECT_TRUE(p.deterministic());
  Rng rng = make_rng(1u);
  EXPECT_EQ(p.sample_action(rng, 0, 0), 2);
  EXPECT_EQ(p.sample_action(rng, 1, 7), 0);  // Stationary: t is ignored.
  EXPECT_EQ(p.sample_action(rng, 2, 0), 1);
  EXPECT_THROW(TabularPolicy::from_actions({3}, 3), std::invalid_argument);
}

TEST(TabularPolicy, TimeDependentPlanIndexing) {
  // Two timesteps, two observations, three actions.
  const TabularPolicy p =
      TabularPolicy::from_plan({{0, 1}, {2, 0}}, /*observation_count=*/2,
                               /*action_count=*/3);
  EXPECT_TRUE(p.time_dependent);
  EXPECT_EQ(p.horizon, 2);
  Rng rng = make_rng(2u);
  EXPECT_EQ(p.sample_action(rng, 0, 0), 0);
  EXPECT_EQ(p.sample_action(rng, 1, 0), 1);
  EXPECT_EQ(p.sample_action(rng, 0, 1), 2);
  EXPECT_EQ(p.sample_action(rng, 1, 1), 0);
  // Past the planned horizon, the final block answers.
  EXPECT_EQ(p.sample_action(rng, 0, 9), 2);
}

TEST(TabularPolicy, ValidationCatchesBadTables) {
  TabularPolicy p = TabularPolicy::uniform(2, 2);
  p.table[0] = 0.7;  // Row 0 now sums to 1.2.
  EXPECT_THROW(p.check_valid(), std::invalid_argument);
  p.table[0] = -0.5;
  EXPECT_THROW(p.check_valid(), std::invalid_argument);
  TabularPolicy q;
  EXPECT_THROW(q.check_valid(), std::invalid_argument);
}

TEST(TabularPolicy, ObservationRangeChecked) {
  const TabularPolicy p = TabularPolicy::uniform(2, 2);
  Rng rng = make_rng(3u);
  EXPECT_THROW(p.sample_action(rng, 2, 0), std::out_of_range);
  EXPECT_THROW(p.sample_action(rng, -1, 0), std::out_of_range);
}

TEST(TabularPolicy, RandomDeterministicIsSeedStable) {
  Rng a = make_rng(77u);
  Rng b = make_rng(77u);
  const TabularPolicy pa = TabularPolicy::random_deterministic(a, 10, 4);
  const TabularPolicy pb = TabularPolicy::random_deterministic(b, 10, 4);
  EXPECT_EQ(pa.table, pb.table);
  EXPECT_TRUE(pa.deterministic());
}

TEST(PolicyIo, RoundTripIsExact) {
  // A stochastic time-dependent table with awkward fractions: every entry
  // must survive the text round trip bit for bit.
  TabularPolicy policy;
  policy.observation_count = 3;
  policy.action_count = 2;
  policy.time_dependent = true;
  policy.horizon = 2;
  policy.metadata = "hand-built fixture";
  policy.table = {1.0 / 3.0, 2.0 / 3.0, 0.1, 0.9, 1.0, 0.0,
                  0.25,      0.75,      0.0, 1.0, 0.5, 0.5};
  policy.check_valid();
  const std::string text = format_policy(policy);
  const TabularPolicy back = parse_policy_text(text);
  EXPECT_EQ(back.observation_count, policy.observation_count);
  EXPECT_EQ(back.action_count, policy.action_count);
  EXPECT_EQ(back.time_dependent, policy.time_dependent);
  EXPECT_EQ(back.horizon, policy.horizon);
  EXPECT_EQ(back.table, policy.table);
  EXPECT_EQ(back.metadata, policy.metadata);
  // Serialization is canonical: a second round trip emits identical bytes.
  EXPECT_EQ(format_policy(back), text);
}

TEST(PolicyIo, ParseRejectsMalformedInput) {
  EXPECT_THROW(parse_policy_text(""), std::invalid_argument);
  EXPECT_THROW(parse_policy_text("policy 2 2 0\n"), std::invalid_argument);
  EXPECT_THROW(parse_policy_text("policy 2 2 0 1\n1 0\n"),
               std::invalid_argument);  // Missing second row.
  EXPECT_THROW(parse_policy_text("policy 1 2 0 1\n1 0 0\n"),
               std::invalid_argument);  // Wrong entry count.
  EXPECT_THROW(parse_policy_text("policy 1 2 0 1\n0.4 0.4\n"),
               std::invalid_argument);  // Rows must sum to one.
  EXPECT_THROW(parse_policy_text("policy 1 2 2 1\n1 0\n"),
               std::invalid_argument);  // Bad time_dependent flag.
  EXPECT_THROW(parse_policy_text("policy 1 2 0 1\n1 0\ngarbage\n"),
               std::invalid_argument);  // Unexpected trailing line.
}

}  // namespace
}  // namespace farr
