/*
 * Copyright (c) 2026, The ShellFT Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHELLFT_CORE_RNG_HPP_
#define SHELLFT_CORE_RNG_HPP_

#include <cstdint>

namespace shellft {

// splitmix64. Hand-rolled so traces are byte-identical for a given seed;
// standard-library distributions leave their sequences unspecified.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [lo, hi] inclusive.
  uint64_t uniform(uint64_t lo, uint64_t hi) {
    if (hi <= lo) return lo;
    uint64_t span = hi - lo + 1;
    // Rejection sampling to avoid modulo bias.
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return lo + v % span;
  }

  double real01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return real01() < p;
  }

  // Deterministically derive an independent stream.
  Rng fork(uint64_t salt) {
    uint64_t s = next() ^ (salt * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
    return Rng(s);
  }

 private:
  uint64_t state_;
};

}  // namespace shellft

#endif  // SHELLFT_CORE_RNG_HPP_
