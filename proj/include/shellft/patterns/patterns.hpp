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

#ifndef SHELLFT_PATTERNS_PATTERNS_HPP_
#define SHELLFT_PATTERNS_PATTERNS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shellft::patterns {

enum class PatternKind : uint8_t { ReliableDistribution, Relay };
enum class PatternVariant : uint8_t { CFT, BFT };

struct PatternInstance {
  PatternKind kind = PatternKind::ReliableDistribution;
  PatternVariant variant = PatternVariant::CFT;
  uint32_t source_count = 1;
  uint32_t witness_or_relay_count = 0;
  uint32_t sink_count = 0;
  uint32_t source_threshold = 0;  // t_s (relay pattern)
  uint32_t sink_threshold = 1;
  uint32_t f = 1;
};

PatternInstance make_rdp(PatternVariant variant, uint32_t f);
PatternInstance make_relay(PatternVariant variant, uint32_t f);

// Switches a CFT pattern to its Byzantine-resilient counterpart when the
// source cluster is in the shell: RDP gains a 3f+1 witness cluster and a
// 2f+1 sink threshold; the relay pattern grows its source cluster from
// 2f+1 to 3f+1 and raises t_s from f+1 to 2f+1. Identity otherwise;
// idempotent on BFT instances.
PatternInstance transform(const PatternInstance& inst, bool source_is_shell);

// Finite value domain for enumeration: 0 is "no value", 1 and 2 are two
// distinguishable symbols (enough to exhibit any equivocation).
using Value = uint8_t;
inline constexpr Value kNone = 0;

// Source behavior: value assigned per witness (BFT) or per sink (CFT).
// Faulty witnesses report an arbitrary value per sink.
std::vector<std::optional<Value>> rdp_run(
    const PatternInstance& inst, const std::vector<Value>& source_behavior,
    const std::map<uint32_t, std::vector<Value>>& witness_faults);

// A relay crash: the relay completes rounds < `round`, reaches the
// recipients selected by `sent_mask` (peers first, then sinks) within
// `round`, and is silent afterwards.
struct RelayCrash {
  uint32_t relay = 0;
  uint32_t round = 0;
  uint32_t sent_mask = 0;
};

// source_values[i][r]: value source i hands relay r (kNone = nothing).
std::vector<std::optional<Value>> relay_run(
    const PatternInstance& inst,
    const std::vector<std::vector<Value>>& source_values,
    const std::vector<RelayCrash>& relay_faults);

struct PropertyResult {
  std::string name;
  uint64_t cases = 0;
  uint64_t violations = 0;
  std::string first_counterexample;
};

struct PatternCheckReport {
  bool pass = false;
  bool exploded = false;  // enumeration exceeded the state budget
  uint64_t enumerated = 0;
  std::vector<PropertyResult> properties;

  std::string str() const;
};

// Exhaustively enumerates adversarial behaviors (per-recipient messages of
// every faulty node, every crash point) at f=1 over the 3-symbol domain
// and asserts the pattern's two properties.
PatternCheckReport check_pattern_properties(const PatternInstance& inst,
                                            uint64_t budget = 20'000'000);

// Control case: an (illegal) equivocating source inside the crash-fault
// reliable-distribution pattern. The checker must find divergence.
PatternCheckReport check_rdp_cft_equivocator(uint32_t f = 1);

// Randomized sampling for f >= 2, where exhaustive enumeration is out of
// reach.
PatternCheckReport sample_pattern_properties(const PatternInstance& inst,
                                             uint64_t samples, uint64_t seed);

}  // namespace shellft::patterns

#endif  // SHELLFT_PATTERNS_PATTERNS_HPP_
