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

#include "farr/parallel.hpp"

#include <atomic>
#include <stdexcept>
#include <vector>

#include "farr/rng.hpp"
#include "gtest/gtest.h"

namespace farr {
namespace {

TEST(ParallelFor, RunsEveryIndexExactlyOnce) {
  for (const int threads : {1, 2, 3, 8}) {
    const int n = 1000;
    std::vector<std::atomic<int>> hits(n);
    parallel_for(n, threads, [&](int i) { hits[i].fetch_add(1); });
    for (int i = 0; i < n; ++i) {
      ASSERT_EQ(hits[i].load(), 1) << "index " << i << " threads " << threads;
    }
  }
}

TEST(ParallelFor, SlotResultsIdenticalAcrossThreadCounts) {
  // With each task deriving its output from its index alone, the filled
  // slots must be bit-identical no matter how many workers ran.
  auto compute = [](int threads) {
    std::vector<Seed> slots(512, 0);
    parallel_for(static_cast<int>(slots.size()), threads, [&](int i) {
      slots[static_cast<size_t>(i)] =
          derive_seed(42, "slot", static_cast<Seed>(i));
    });
    return slots;
  };
  const std::vector<Seed> serial = compute(1);
  EXPECT_EQ(compute(2), serial);
  EXPECT_EQ(compute(7), serial);
}

TEST(ParallelFor, ZeroTasksIsANoOp) {
  int calls = 0;
  parallel_for(0, 4, [&](int) { ++calls; });
  EXPECT_EQ(calls, 0);
}

TEST(ParallelFor, PropagatesTaskException) {
  const auto run = [](int threads) {
    parallel_for(100, threads, [](int i) {
      if (i == 57) throw std::runtime_error("task failure");
    });
  };
  EXPECT_THROW(run(1), std::runtime_error);
  EXPECT_THROW(run(4), std::runtime_error);
}

TEST(ParallelFor, RejectsBadArguments) {
  EXPECT_THROW(parallel_for(-1, 1, [](int) {}), std::invalid_argument);
  EXPECT_THROW(parallel_for(10, 0, [](int) {}), std::invalid_argument);
}

}  // namespace
}  // namespace farr
