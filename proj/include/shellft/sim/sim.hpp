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

#ifndef SHELLFT_SIM_SIM_HPP_
#define SHELLFT_SIM_SIM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shellft/app/workload.hpp"
#include "shellft/sim/trace.hpp"
#include "shellft/tailor/blueprint.hpp"

namespace shellft::sim {

// Partial synchrony: seeded delays, optional drops and partitions before
// the global stabilization time; after gst every send between correct
// machines lands within the delay bound (retransmission included).
struct NetworkModel {
  uint64_t min_delay_ms = 1;
  uint64_t max_delay_ms = 5;
  double drop_probability = 0.0;
  uint64_t gst_ms = 0;
  struct Partition {
    uint64_t from_ms = 0;
    uint64_t to_ms = 0;
    // Machines on side A (group, index); everything else is side B.
    std::vector<std::pair<std::string, uint32_t>> side_a;
  };
  std::vector<Partition> partitions;
};

enum class FaultKind : uint8_t {
  Crash,
  EquivocateProposals,
  ForgeReply,
  ForgeCheckpoint,
  ForgeViewChangeReport,
  ArbitraryBytes,
};

std::string_view fault_kind_name(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(std::string_view name);
bool fault_applicable(FaultKind kind, ClusterRole role);

struct FaultEntry {
  uint64_t at_ms = 0;
  bool machine_target = false;
  ReplicaId replica;          // replica target
  std::string group;          // machine target
  uint32_t machine_index = 0;
  FaultKind kind = FaultKind::Crash;
};

struct FaultScript {
  std::vector<FaultEntry> entries;
};

// Script lines: "at <ms> crash <cluster>/<idx>", "at <ms> crash machine
// <group>/<idx>", "at <ms> byzantine <cluster>/<idx> <kind>".
std::optional<FaultScript> parse_fault_script(const std::string& text,
                                              std::string* error = nullptr);
std::string serialize_fault_script(const FaultScript& script);

// Rejects inapplicable (role, kind) pairs and unresolvable targets.
std::vector<std::string> validate_fault_script(
    const FaultScript& script, const tailor::SystemBlueprint& bp);

// At most f faulty replicas per cluster (machine crashes count against
// every hosted cluster), at most f machines per group.
bool fault_script_within_model(const FaultScript& script,
                               const tailor::SystemBlueprint& bp);

struct RunConfig {
  tailor::SystemBlueprint blueprint;
  app::WorkloadSpec workload;
  NetworkModel network;
  FaultScript faults;
  uint64_t seed = 1;
  uint64_t horizon_ms = 10000;
  bool record_deliveries = false;
};

struct Metrics {
  uint64_t bucket_ms = 100;
  std::vector<uint64_t> committed_per_bucket;
  std::vector<double> mean_latency_per_bucket;  // of replies delivered
  uint64_t committed = 0;
  uint64_t delivered = 0;
  double mean_latency_ms = 0.0;
  uint64_t p50_latency_ms = 0;
  uint64_t p95_latency_ms = 0;
  uint64_t max_view = 0;
  uint64_t longest_commit_gap_ms = 0;
  uint64_t gap_start_ms = 0;

  std::string to_text() const;
};

Metrics compute_metrics(const TraceFile& trace, uint64_t bucket_ms = 100);

struct RunResult {
  TraceFile trace;
  Metrics metrics;
};

RunResult run_simulation(const RunConfig& config);

}  // namespace shellft::sim

#endif  // SHELLFT_SIM_SIM_HPP_
