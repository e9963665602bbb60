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

#ifndef SHELLFT_CORE_QUORUM_HPP_
#define SHELLFT_CORE_QUORUM_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "shellft/core/ids.hpp"

namespace shellft {

// One numeric opinion per reporter; later reports keep the per-reporter
// maximum so stale values cannot regress an already reached threshold.
class OpinionSet {
 public:
  void report(const ReplicaId& reporter, uint64_t value) {
    auto [it, inserted] = opinions_.try_emplace(reporter, value);
    if (!inserted && value > it->second) it->second = value;
  }

  // The threshold-th largest reported value: the largest v such that at
  // least `threshold` reporters announced values >= v. None while fewer
  // than `threshold` reporters have spoken.
  std::optional<uint64_t> highest(size_t threshold) const {
    if (threshold == 0 || opinions_.size() < threshold) return std::nullopt;
    std::vector<uint64_t> ranking;
    ranking.reserve(opinions_.size());
    for (const auto& [id, v] : opinions_) ranking.push_back(v);
    std::sort(ranking.begin(), ranking.end(), std::greater<>());
    return ranking[threshold - 1];
  }

  size_t reporter_count() const { return opinions_.size(); }
  const std::map<ReplicaId, uint64_t>& opinions() const { return opinions_; }

 private:
  std::map<ReplicaId, uint64_t> opinions_;
};

template <typename V>
struct QuorumResult {
  std::optional<V> value;
  // Two distinct values both reached the threshold. Signals a mis-sized
  // cluster or a bug; callers surface this, never resolve it silently.
  bool ambiguous = false;
};

// Returns v once at least `threshold` distinct senders reported
// exactly-equal value v.
template <typename V>
QuorumResult<V> quorum_match(const std::map<ReplicaId, V>& inputs,
                             size_t threshold) {
  QuorumResult<V> result;
  if (threshold == 0) return result;
  std::map<V, size_t> counts;
  for (const auto& [id, v] : inputs) ++counts[v];
  for (const auto& [v, n] : counts) {
    if (n < threshold) continue;
    if (result.value) {
      result.ambiguous = true;
      result.value.reset();
      return result;
    }
    result.value = v;
  }
  return result;
}

}  // namespace shellft

#endif  // SHELLFT_CORE_QUORUM_HPP_
