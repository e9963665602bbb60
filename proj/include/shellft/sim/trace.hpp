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

#ifndef SHELLFT_SIM_TRACE_HPP_
#define SHELLFT_SIM_TRACE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shellft/core/ids.hpp"

namespace shellft::sim {

enum class TraceKind : uint8_t {
  Submit,
  FeAccept,
  Commit,
  Execute,
  ReplyDeliver,
  ViewAnnounce,
  NewView,
  Checkpoint,
  CheckpointInstall,
  Alarm,
  Fault,
  CommandDef,
  Deliver,
};

// One totally ordered record of the run. Field use varies by kind; the
// line codec keeps a stable field order so trace files diff cleanly.
struct TraceRecord {
  uint64_t time = 0;
  TraceKind kind = TraceKind::Submit;
  ReplicaId who;
  uint64_t seq = 0;
  uint64_t view = 0;
  Digest digest = 0;
  uint32_t client = 0;
  uint64_t counter = 0;
  bool dup = false;
  bool noop = false;
  std::string text;

  std::string to_line() const;
  static std::optional<TraceRecord> from_line(const std::string& line);
};

struct ReplicaStatus {
  ReplicaId id;
  std::string machine_group;  // "client" for clients
  uint32_t machine_index = 0;
  bool correct = true;
  std::string fault;          // "crash@1000" or "forge_reply@500"
};

struct TraceFile {
  std::string preset;
  uint32_t f = 1;
  uint64_t seed = 0;
  uint64_t horizon_ms = 0;
  bool within_model = true;
  std::vector<ReplicaStatus> replicas;
  std::vector<TraceRecord> records;

  bool is_correct(const ReplicaId& id) const;
  std::vector<ReplicaId> correct_members(ClusterRole role) const;

  std::string serialize() const;
  static std::optional<TraceFile> parse(const std::string& text,
                                        std::string* error = nullptr);
};

}  // namespace shellft::sim

#endif  // SHELLFT_SIM_TRACE_HPP_
