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

#ifndef SHELLFT_TAILOR_BLUEPRINT_HPP_
#define SHELLFT_TAILOR_BLUEPRINT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shellft/core/ids.hpp"
#include "shellft/core/messages.hpp"

namespace shellft::tailor {

enum class FaultDomain : uint8_t { Core, Filter, Shell };

std::string_view domain_name(FaultDomain domain);

struct ClusterSpec {
  ClusterRole role;
  uint32_t size = 0;
  FaultDomain domain = FaultDomain::Core;
  bool expanded = false;  // size update to 3f+1 was applied
};

struct Edge {
  ClusterRole producer;
  ClusterRole consumer;
  MessageKind kind;

  auto operator<=>(const Edge&) const = default;
};

using DependencyGraph = std::vector<Edge>;

enum class ViewChangeMode : uint8_t { Base, AdaptedProposer, CuratorPipeline };

std::string_view vc_mode_name(ViewChangeMode mode);

// Acceptance thresholds per input edge. Base values follow the crash
// model; configure() raises an input by f whenever its producer cluster
// was expanded to 3f+1.
struct Thresholds {
  uint32_t commit = 0;           // executor <- committer confirms
  bool commit_match = false;     // digest matching (shell committers) vs
                                 // count of confirmations, first value
  uint32_t prepare_opinion = 0;  // committer <- preparer (0: no preparers)
  uint32_t reply = 0;            // client <- executor replies
  uint32_t checkpoint = 0;       // executor <- peer checkpoints
  uint32_t ts_agreement = 0;     // monitor <- source reports, per loop
  uint32_t ts_completion = 0;
  uint32_t ts_view = 0;
  uint32_t peer_agreement = 0;   // monitor <- peer forward
  uint32_t peer_completion = 0;
  uint32_t peer_view = 0;
  uint32_t obs_agreement = 0;    // observer <- monitor values
  uint32_t obs_completion = 0;
  uint32_t obs_view = 0;
  uint32_t submission = 0;       // controller <- front-end counts
  uint32_t vc_reports = 0;       // proposer <- committer slot histories
  uint32_t vc_support = 0;       // adapted proposer: per-slot matching claims
  uint32_t ev_preparer = 0;      // conservator <- preparer evidence
  uint32_t ev_committer = 0;     // conservator <- committer evidence
  uint32_t ev_committer_support = 0;  // matching committer claims per slot
  uint32_t curator_reports = 0;  // curator/auditor <- conservator reports
  uint32_t cert_support = 0;     // conservator claims backing a certificate
  uint32_t voucher = 0;          // record keeper <- auditor vouchers
  uint32_t decision = 0;         // proposer/preparer <- record keepers
  uint32_t reject = 0;           // controller <- auditor rejections
};

struct DeploymentMachine {
  std::string group;  // "shell" or "filtercore"
  uint32_t index = 0;
  std::vector<ReplicaId> hosts;
};

struct ProtocolParams {
  uint64_t window_capacity = 256;
  uint64_t checkpoint_interval = 16;
  uint64_t tick_ms = 10;
  uint64_t client_retry_ms = 100;
  uint64_t timeout_base_ms = 1000;
  uint64_t client_window = 16;
};

struct SystemBlueprint {
  uint32_t f = 1;
  std::string preset;  // empty when built from an explicit selection
  std::set<ClusterRole> shell;  // includes clusters that joined (curator)
  std::vector<ClusterSpec> clusters;
  DependencyGraph edges;
  ViewChangeMode vc_mode = ViewChangeMode::Base;
  bool has_preparer = false;
  Thresholds thresholds;
  std::vector<DeploymentMachine> machines;
  std::map<ReplicaId, std::string> diversity;
  ProtocolParams params;

  const ClusterSpec* find_cluster(ClusterRole role) const;
  uint32_t size_of(ClusterRole role) const;
  FaultDomain domain_of(ClusterRole role) const;
  std::optional<std::pair<std::string, uint32_t>> machine_of(
      const ReplicaId& replica) const;
  uint32_t total_replicas() const;
  uint32_t shell_replicas() const;
};

std::string serialize_blueprint(const SystemBlueprint& bp);
std::optional<SystemBlueprint> parse_blueprint(const std::string& text,
                                               std::string* error = nullptr);

// Structural invariants (sizes, threshold arithmetic, group disjointness,
// placement rules). Returns problems; empty means valid.
std::vector<std::string> validate_blueprint(const SystemBlueprint& bp);

}  // namespace shellft::tailor

#endif  // SHELLFT_TAILOR_BLUEPRINT_HPP_
