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

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

// Deterministic, hierarchical random number utilities.
//
// Every stochastic component in this library draws from an engine whose seed
// is *derived* from a parent seed plus a label path, e.g.
//
//   Rng rng = make_rng(derive_seed(run_seed, "payoff", row, col));
//
// Derivation is a pure function (splitmix64 mixing over FNV-1a label hashes),
// so any cell of any experiment can be recomputed in isolation, in any order,
// on any number of threads, and produce identical results.

namespace farr {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

// One round of the splitmix64 output function: a cheap, well-mixed bijection.
constexpr Seed split_mix(Seed x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a hash of a label string.
constexpr Seed hash_label(std::string_view label) {
  Seed h = 0xcbf29ce484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Child seed for an integer-labelled stream of `parent`.
constexpr Seed derive_seed(Seed parent, Seed label) {
  return split_mix(parent ^ split_mix(label + 0x632be59bd9b4e019ULL));
}

constexpr Seed derive_seed(Seed parent, std::string_view label) {
  return derive_seed(parent, hash_label(label));
}

// Path form: derive_seed(s, "payoff", i, j) == successive derivations.
template <typename First, typename Second, typename... Rest>
constexpr Seed derive_seed(Seed parent, First first, Second second,
                           Rest... rest) {
  return derive_seed(derive_seed(parent, first), second, rest...);
}

inline Rng make_rng(Seed seed) { return Rng(split_mix(seed)); }

// Samples an index proportionally to `weights` (non-negative, positive sum).
inline int sample_index(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (const double w : weights) {
    if (w < 0.0) throw std::invalid_argument("sample_index: negative weight");
    total += w;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("sample_index: weights must have positive sum");
  }
  std::uniform_real_distribution<double> unif(0.0, total);
  const double r = unif(rng);
  double cumulative = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    cumulative += weights[i];
    if (r < cumulative && weights[i] > 0.0) return i;
  }
  return last_positive;  // r landed on the far edge by rounding.
}

// Beta(alpha, beta) variate via two gamma draws: X/(X+Y) with
// X~Gamma(alpha,1), Y~Gamma(beta,1).
inline double sample_beta(Rng& rng, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("sample_beta: shape parameters must be > 0");
  }
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y <= 0.0) return 0.5;  // Underflow for tiny shapes; split the odds.
  return x / (x + y);
}

}  // namespace farr
