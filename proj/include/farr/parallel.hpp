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
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace farr {

// Runs fn(i) exactly once for every i in [0, n), on up to `threads` worker
// threads. Each task must derive everything it needs (seeds included) from i
// alone and write only to its own preassigned output slot, so results are
// bit-identical for every thread count: only wall-clock scheduling varies.
// If any task throws, the first exception observed is rethrown after all
// workers finish.
template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
  if (n < 0) {
    throw std::invalid_argument("parallel_for: negative task count");
  }
  if (threads < 1) {
    throw std::invalid_argument("parallel_for: threads must be >= 1");
  }
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  const auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int worker_count = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(worker_count));
  for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace farr
