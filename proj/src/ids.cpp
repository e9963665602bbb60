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

#include "shellft/core/ids.hpp"

#include <utility>

namespace shellft {

namespace {

constexpr std::pair<ClusterRole, std::string_view> kRoleNames[] = {
    {ClusterRole::FrontEnd, "front_end"},
    {ClusterRole::Proposer, "proposer"},
    {ClusterRole::Preparer, "preparer"},
    {ClusterRole::Committer, "committer"},
    {ClusterRole::Executor, "executor"},
    {ClusterRole::Controller, "controller"},
    {ClusterRole::AgreementMonitor, "agreement_monitor"},
    {ClusterRole::AgreementObserver, "agreement_observer"},
    {ClusterRole::CompletionMonitor, "completion_monitor"},
    {ClusterRole::CompletionObserver, "completion_observer"},
    {ClusterRole::ViewMonitor, "view_monitor"},
    {ClusterRole::ViewObserver, "view_observer"},
    {ClusterRole::Conservator, "conservator"},
    {ClusterRole::Curator, "curator"},
    {ClusterRole::Auditor, "auditor"},
    {ClusterRole::RecordKeeper, "record_keeper"},
    {ClusterRole::Client, "client"},
};

}  // namespace

std::string_view role_name(ClusterRole role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unknown";
}

std::optional<ClusterRole> parse_role(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  // Accept a few aliases used in shell selections on the command line.
  if (name == "frontend" || name == "front-end") return ClusterRole::FrontEnd;
  if (name == "agreement-monitor") return ClusterRole::AgreementMonitor;
  if (name == "completion-monitor") return ClusterRole::CompletionMonitor;
  if (name == "view-monitor") return ClusterRole::ViewMonitor;
  if (name == "record-keeper") return ClusterRole::RecordKeeper;
  return std::nullopt;
}

std::optional<ReplicaId> parse_replica_id(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto role = parse_role(text.substr(0, slash));
  if (!role) return std::nullopt;
  uint32_t index = 0;
  auto digits = text.substr(slash + 1);
  if (digits.empty()) return std::nullopt;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    index = index * 10 + static_cast<uint32_t>(c - '0');
  }
  return ReplicaId{*role, index};
}

}  // namespace shellft
