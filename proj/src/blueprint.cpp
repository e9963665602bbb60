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

#include "shellft/tailor/blueprint.hpp"

#include <sstream>

namespace shellft::tailor {

std::string_view domain_name(FaultDomain domain) {
  switch (domain) {
    case FaultDomain::Core: return "core";
    case FaultDomain::Filter: return "filter";
    case FaultDomain::Shell: return "shell";
  }
  return "unknown";
}

std::string_view vc_mode_name(ViewChangeMode mode) {
  switch (mode) {
    case ViewChangeMode::Base: return "base";
    case ViewChangeMode::AdaptedProposer: return "adapted_proposer";
    case ViewChangeMode::CuratorPipeline: return "curator_pipeline";
  }
  return "unknown";
}

const ClusterSpec* SystemBlueprint::find_cluster(ClusterRole role) const {
  for (const auto& c : clusters) {
    if (c.role == role) return &c;
  }
  return nullptr;
}

uint32_t SystemBlueprint::size_of(ClusterRole role) const {
  const auto* c = find_cluster(role);
  return c ? c->size : 0;
}

FaultDomain SystemBlueprint::domain_of(ClusterRole role) const {
  const auto* c = find_cluster(role);
  return c ? c->domain : FaultDomain::Core;
}

std::optional<std::pair<std::string, uint32_t>> SystemBlueprint::machine_of(
    const ReplicaId& replica) const {
  for (const auto& m : machines) {
    for (const auto& host : m.hosts) {
      if (host == replica) return std::make_pair(m.group, m.index);
    }
  }
  return std::nullopt;
}

uint32_t SystemBlueprint::total_replicas() const {
  uint32_t total = 0;
  for (const auto& c : clusters) total += c.size;
  return total;
}

uint32_t SystemBlueprint::shell_replicas() const {
  uint32_t total = 0;
  for (const auto& c : clusters) {
    if (c.domain == FaultDomain::Shell) total += c.size;
  }
  return total;
}

namespace {

std::optional<MessageKind> parse_message_kind(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(MessageKind::CheckpointResponse); ++k) {
    auto kind = static_cast<MessageKind>(k);
    if (message_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<FaultDomain> parse_domain(std::string_view name) {
  if (name == "core") return FaultDomain::Core;
  if (name == "filter") return FaultDomain::Filter;
  if (name == "shell") return FaultDomain::Shell;
  return std::nullopt;
}

std::optional<ViewChangeMode> parse_vc_mode(std::string_view name) {
  if (name == "base") return ViewChangeMode::Base;
  if (name == "adapted_proposer") return ViewChangeMode::AdaptedProposer;
  if (name == "curator_pipeline") return ViewChangeMode::CuratorPipeline;
  return std::nullopt;
}

}  // namespace

std::string serialize_blueprint(const SystemBlueprint& bp) {
  std::ostringstream out;
  out << "shellft-blueprint v1\n";
  out << "f " << bp.f << "\n";
  if (!bp.preset.empty()) out << "preset " << bp.preset << "\n";
  out << "shell";
  if (bp.shell.empty()) {
    out << " -";
  } else {
    bool first = true;
    out << " ";
    for (auto role : bp.shell) {
      if (!first) out << ",";
      out << role_name(role);
      first = false;
    }
  }
  out << "\n";
  out << "vc_mode " << vc_mode_name(bp.vc_mode) << "\n";
  out << "preparer " << (bp.has_preparer ? 1 : 0) << "\n";
  out << "params window " << bp.params.window_capacity << " checkpoint "
      << bp.params.checkpoint_interval << " tick " << bp.params.tick_ms
      << " client_retry " << bp.params.client_retry_ms << " timeout "
      << bp.params.timeout_base_ms << " client_window "
      << bp.params.client_window << "\n";
  for (const auto& c : bp.clusters) {
    out << "cluster " << role_name(c.role) << " size " << c.size << " domain "
        << domain_name(c.domain) << " expanded " << (c.expanded ? 1 : 0)
        << "\n";
  }
  const auto& t = bp.thresholds;
  out << "threshold commit " << t.commit << " mode "
      << (t.commit_match ? "match" : "count") << "\n";
  out << "threshold prepare_opinion " << t.prepare_opinion << "\n";
  out << "threshold reply " << t.reply << "\n";
  out << "threshold checkpoint " << t.checkpoint << "\n";
  out << "threshold ts " << t.ts_agreement << " " << t.ts_completion << " "
      << t.ts_view << "\n";
  out << "threshold peer " << t.peer_agreement << " " << t.peer_completion
      << " " << t.peer_view << "\n";
  out << "threshold observer " << t.obs_agreement << " " << t.obs_completion
      << " " << t.obs_view << "\n";
  out << "threshold submission " << t.submission << "\n";
  out << "threshold vc_reports " << t.vc_reports << " support " << t.vc_support
      << "\n";
  out << "threshold evidence " << t.ev_preparer << " " << t.ev_committer << " "
      << t.ev_committer_support << "\n";
  out << "threshold curator " << t.curator_reports << " cert " << t.cert_support
      << "\n";
  out << "threshold voucher " << t.voucher << "\n";
  out << "threshold decision " << t.decision << "\n";
  out << "threshold reject " << t.reject << "\n";
  for (const auto& e : bp.edges) {
    out << "edge " << role_name(e.producer) << " " << role_name(e.consumer)
        << " " << message_kind_name(e.kind) << "\n";
  }
  for (const auto& m : bp.machines) {
    out << "machine " << m.group << " " << m.index << " hosts";
    for (const auto& host : m.hosts) out << " " << host.str();
    out << "\n";
  }
  for (const auto& [replica, label] : bp.diversity) {
    out << "diversity " << replica.str() << " " << label << "\n";
  }
  return out.str();
}

std::optional<SystemBlueprint> parse_blueprint(const std::string& text,
                                               std::string* error) {
  auto fail = [error](const std::string& msg) -> std::optional<SystemBlueprint> {
    if (error) *error = msg;
    return std::nullopt;
  };
  SystemBlueprint bp;
  bp.clusters.clear();
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "shellft-blueprint v1") {
    return fail("bad header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "f") {
      ls >> bp.f;
    } else if (word == "preset") {
      ls >> bp.preset;
    } else if (word == "shell") {
      std::string roles;
      ls >> roles;
      if (roles != "-") {
        size_t start = 0;
        while (start <= roles.size()) {
          size_t end = roles.find(',', start);
          if (end == std::string::npos) end = roles.size();
          auto role = parse_role(roles.substr(start, end - start));
          if (!role) return fail("bad shell role in: " + line);
          bp.shell.insert(*role);
          start = end + 1;
        }
      }
    } else if (word == "vc_mode") {
      std::string mode;
      ls >> mode;
      auto parsed = parse_vc_mode(mode);
      if (!parsed) return fail("bad vc_mode: " + mode);
      bp.vc_mode = *parsed;
    } else if (word == "preparer") {
      int v = 0;
      ls >> v;
      bp.has_preparer = v != 0;
    } else if (word == "params") {
      std::string key;
      while (ls >> key) {
        uint64_t value = 0;
        if (!(ls >> value)) return fail("bad params line: " + line);
        if (key == "window") bp.params.window_capacity = value;
        else if (key == "checkpoint") bp.params.checkpoint_interval = value;
        else if (key == "tick") bp.params.tick_ms = value;
        else if (key == "client_retry") bp.params.client_retry_ms = value;
        else if (key == "timeout") bp.params.timeout_base_ms = value;
        else if (key == "client_window") bp.params.client_window = value;
        else return fail("unknown param: " + key);
      }
    } else if (word == "cluster") {
      std::string role, kw1, kw2, kw3, dom;
      uint32_t size = 0;
      int expanded = 0;
      ls >> role >> kw1 >> size >> kw2 >> dom >> kw3 >> expanded;
      auto parsed_role = parse_role(role);
      auto parsed_dom = parse_domain(dom);
      if (!parsed_role || !parsed_dom || kw1 != "size" || kw2 != "domain" ||
          kw3 != "expanded") {
        return fail("bad cluster line: " + line);
      }
      bp.clusters.push_back(
          ClusterSpec{*parsed_role, size, *parsed_dom, expanded != 0});
    } else if (word == "threshold") {
      std::string which;
      ls >> which;
      auto& t = bp.thresholds;
      if (which == "commit") {
        std::string kw, mode;
        ls >> t.commit >> kw >> mode;
        t.commit_match = mode == "match";
      } else if (which == "prepare_opinion") ls >> t.prepare_opinion;
      else if (which == "reply") ls >> t.reply;
      else if (which == "checkpoint") ls >> t.checkpoint;
      else if (which == "ts") ls >> t.ts_agreement >> t.ts_completion >> t.ts_view;
      else if (which == "peer") ls >> t.peer_agreement >> t.peer_completion >> t.peer_view;
      else if (which == "observer") ls >> t.obs_agreement >> t.obs_completion >> t.obs_view;
      else if (which == "submission") ls >> t.submission;
      else if (which == "vc_reports") {
        std::string kw;
        ls >> t.vc_reports >> kw >> t.vc_support;
      } else if (which == "evidence") {
        ls >> t.ev_preparer >> t.ev_committer >> t.ev_committer_support;
      } else if (which == "curator") {
        std::string kw;
        ls >> t.curator_reports >> kw >> t.cert_support;
      } else if (which == "voucher") ls >> t.voucher;
      else if (which == "decision") ls >> t.decision;
      else if (which == "reject") ls >> t.reject;
      else return fail("unknown threshold: " + which);
    } else if (word == "edge") {
      std::string producer, consumer, kind;
      ls >> producer >> consumer >> kind;
      auto p = parse_role(producer);
      auto c = parse_role(consumer);
      auto k = parse_message_kind(kind);
      if (!p || !c || !k) return fail("bad edge line: " + line);
      bp.edges.push_back(Edge{*p, *c, *k});
    } else if (word == "machine") {
      DeploymentMachine m;
      std::string kw;
      ls >> m.group >> m.index >> kw;
      if (kw != "hosts") return fail("bad machine line: " + line);
      std::string host;
      while (ls >> host) {
        auto id = parse_replica_id(host);
        if (!id) return fail("bad host: " + host);
        m.hosts.push_back(*id);
      }
      bp.machines.push_back(std::move(m));
    } else if (word == "diversity") {
      std::string replica, label;
      ls >> replica >> label;
      auto id = parse_replica_id(replica);
      if (!id) return fail("bad diversity line: " + line);
      bp.diversity[*id] = label;
    } else {
      return fail("unknown directive: " + word);
    }
  }
  if (bp.clusters.empty()) return fail("no clusters");
  return bp;
}

}  // namespace shellft::tailor
