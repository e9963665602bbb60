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

#include <map>
#include <set>
#include <sstream>

#include "shellft/sim/sim.hpp"

namespace shellft::sim {

std::string_view fault_kind_name(FaultKind kind) {
  switch (kind) {
    case FaultKind::Crash: return "crash";
    case FaultKind::EquivocateProposals: return "equivocate_proposals";
    case FaultKind::ForgeReply: return "forge_reply";
    case FaultKind::ForgeCheckpoint: return "forge_checkpoint";
    case FaultKind::ForgeViewChangeReport: return "forge_view_change_report";
    case FaultKind::ArbitraryBytes: return "arbitrary_bytes";
  }
  return "unknown";
}

std::optional<FaultKind> parse_fault_kind(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(FaultKind::ArbitraryBytes); ++k) {
    auto kind = static_cast<FaultKind>(k);
    if (fault_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

bool fault_applicable(FaultKind kind, ClusterRole role) {
  switch (kind) {
    case FaultKind::Crash:
      return true;
    case FaultKind::EquivocateProposals:
      return role == ClusterRole::Proposer || role == ClusterRole::Curator;
    case FaultKind::ForgeReply:
    case FaultKind::ForgeCheckpoint:
      return role == ClusterRole::Executor;
    case FaultKind::ForgeViewChangeReport:
      return role == ClusterRole::Committer || role == ClusterRole::Conservator;
    case FaultKind::ArbitraryBytes:
      return role != ClusterRole::Client;
  }
  return false;
}

std::optional<FaultScript> parse_fault_script(const std::string& text,
                                              std::string* error) {
  auto fail = [error](const std::string& msg) -> std::optional<FaultScript> {
    if (error) *error = msg;
    return std::nullopt;
  };
  FaultScript script;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string at_kw, action;
    uint64_t at = 0;
    if (!(ls >> at_kw >> at >> action) || at_kw != "at") {
      return fail("bad fault line: " + line);
    }
    FaultEntry entry;
    entry.at_ms = at;
    if (action == "crash") {
      std::string target;
      ls >> target;
      if (target == "machine") {
        std::string loc;
        ls >> loc;
        auto slash = loc.rfind('/');
        if (slash == std::string::npos) return fail("bad machine: " + line);
        entry.machine_target = true;
        entry.group = loc.substr(0, slash);
        entry.machine_index =
            static_cast<uint32_t>(std::stoul(loc.substr(slash + 1)));
      } else {
        auto id = parse_replica_id(target);
        if (!id) return fail("bad crash target: " + line);
        entry.replica = *id;
      }
      entry.kind = FaultKind::Crash;
    } else if (action == "byzantine") {
      std::string target, kind;
      ls >> target >> kind;
      auto id = parse_replica_id(target);
      auto parsed = parse_fault_kind(kind);
      if (!id || !parsed || *parsed == FaultKind::Crash) {
        return fail("bad byzantine line: " + line);
      }
      entry.replica = *id;
      entry.kind = *parsed;
    } else {
      return fail("unknown fault action: " + action);
    }
    script.entries.push_back(entry);
  }
  return script;
}

std::string serialize_fault_script(const FaultScript& script) {
  std::ostringstream out;
  for (const auto& entry : script.entries) {
    out << "at " << entry.at_ms << ' ';
    if (entry.kind == FaultKind::Crash) {
      out << "crash ";
      if (entry.machine_target) {
        out << "machine " << entry.group << "/" << entry.machine_index;
      } else {
        out << entry.replica.str();
      }
    } else {
      out << "byzantine " << entry.replica.str() << ' '
          << fault_kind_name(entry.kind);
    }
    out << "\n";
  }
  return out.str();
}

std::vector<std::string> validate_fault_script(
    const FaultScript& script, const tailor::SystemBlueprint& bp) {
  std::vector<std::string> problems;
  for (const auto& entry : script.entries) {
    if (entry.machine_target) {
      bool found = false;
      for (const auto& m : bp.machines) {
        found = found ||
                (m.group == entry.group && m.index == entry.machine_index);
      }
      if (!found) {
        problems.push_back("unknown machine " + entry.group + "/" +
                           std::to_string(entry.machine_index));
      }
      continue;
    }
    const auto* cluster = bp.find_cluster(entry.replica.cluster);
    if (cluster == nullptr || entry.replica.index >= cluster->size) {
      problems.push_back("unknown replica " + entry.replica.str());
      continue;
    }
    if (!fault_applicable(entry.kind, entry.replica.cluster)) {
      problems.push_back(std::string(fault_kind_name(entry.kind)) +
                         " not applicable to " +
                         std::string(role_name(entry.replica.cluster)));
    }
  }
  return problems;
}

bool fault_script_within_model(const FaultScript& script,
                               const tailor::SystemBlueprint& bp) {
  std::map<ClusterRole, std::set<uint32_t>> per_cluster;
  std::map<std::string, std::set<uint32_t>> machines;
  for (const auto& entry : script.entries) {
    if (entry.machine_target) {
      machines[entry.group].insert(entry.machine_index);
      for (const auto& m : bp.machines) {
        if (m.group == entry.group && m.index == entry.machine_index) {
          for (const auto& host : m.hosts) {
            per_cluster[host.cluster].insert(host.index);
          }
        }
      }
    } else {
      per_cluster[entry.replica.cluster].insert(entry.replica.index);
    }
  }
  for (const auto& [group, set] : machines) {
    if (set.size() > bp.f) return false;
  }
  for (const auto& [role, set] : per_cluster) {
    if (set.size() > bp.f) return false;
  }
  return true;
}

}  // namespace shellft::sim
