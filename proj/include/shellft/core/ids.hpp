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

#ifndef SHELLFT_CORE_IDS_HPP_
#define SHELLFT_CORE_IDS_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace shellft {

// Cluster roles. The first eight (plus Client) form the base protocol;
// Preparer through RecordKeeper are installed by tailoring. Observer roles
// identify relay-pattern sinks embedded in their host replicas.
enum class ClusterRole : uint8_t {
  FrontEnd,
  Proposer,
  Preparer,
  Committer,
  Executor,
  Controller,
  AgreementMonitor,
  AgreementObserver,
  CompletionMonitor,
  CompletionObserver,
  ViewMonitor,
  ViewObserver,
  Conservator,
  Curator,
  Auditor,
  RecordKeeper,
  Client,
};

inline constexpr std::array<ClusterRole, 8> kBaseRoles = {
    ClusterRole::FrontEnd,         ClusterRole::Proposer,
    ClusterRole::Committer,        ClusterRole::Executor,
    ClusterRole::Controller,       ClusterRole::AgreementMonitor,
    ClusterRole::CompletionMonitor, ClusterRole::ViewMonitor,
};

std::string_view role_name(ClusterRole role);
std::optional<ClusterRole> parse_role(std::string_view name);

struct ReplicaId {
  ClusterRole cluster = ClusterRole::Client;
  uint32_t index = 0;

  auto operator<=>(const ReplicaId&) const = default;

  std::string str() const {
    return std::string(role_name(cluster)) + "/" + std::to_string(index);
  }
};

std::optional<ReplicaId> parse_replica_id(std::string_view text);

// (view, seq) coordinates of a consensus instance.
struct ProtocolCoordinates {
  uint64_t view = 0;
  uint64_t seq = 0;

  auto operator<=>(const ProtocolCoordinates&) const = default;
};

// A client command. (client, counter) identifies the command system-wide;
// client 0 is reserved for no-op fillers proposed during view changes.
struct Command {
  uint32_t client = 0;
  uint64_t counter = 0;
  std::string payload;

  bool is_noop() const { return client == 0; }
  bool operator==(const Command&) const = default;

  static Command noop(uint64_t seq) { return Command{0, seq, {}}; }
};

using Digest = uint64_t;

inline Digest fnv1a(std::string_view bytes, Digest seed = 0xcbf29ce484222325ull) {
  Digest h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline Digest fnv1a_u64(uint64_t v, Digest seed) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  return fnv1a(std::string_view(buf, 8), seed);
}

inline Digest digest_of(const Command& cmd) {
  Digest h = fnv1a_u64(cmd.client, 0xcbf29ce484222325ull);
  h = fnv1a_u64(cmd.counter, h);
  return fnv1a(cmd.payload, h);
}

}  // namespace shellft

#endif  // SHELLFT_CORE_IDS_HPP_
