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

#include "shellft/tailor/tailor.hpp"

#include <algorithm>
#include <sstream>

namespace shellft::tailor {

std::optional<ShellSelection> preset_selection(const std::string& name) {
  ShellSelection sel;
  sel.preset = name;
  if (name == "base") return sel;
  if (name == "minas") {
    sel.base_roles = {ClusterRole::FrontEnd, ClusterRole::Executor};
    return sel;
  }
  if (name == "sentry") {
    sel.base_roles = {ClusterRole::Proposer, ClusterRole::Executor};
    return sel;
  }
  if (name == "minas-sentry" || name == "minas+sentry") {
    sel.preset = "minas-sentry";
    sel.base_roles = {ClusterRole::FrontEnd, ClusterRole::Proposer,
                      ClusterRole::Executor};
    return sel;
  }
  if (name == "mirador") {
    sel.base_roles.insert(kBaseRoles.begin(), kBaseRoles.end());
    sel.added_clusters_shell = true;
    return sel;
  }
  return std::nullopt;
}

std::optional<ShellSelection> parse_shell_selection(const std::string& text,
                                                    std::string* error) {
  if (auto preset = preset_selection(text)) return preset;
  ShellSelection sel;
  if (text.empty() || text == "-" || text == "none") return sel;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(start, end - start);
    start = end + 1;
    if (token.empty()) continue;
    auto role = parse_role(token);
    if (!role ||
        std::find(kBaseRoles.begin(), kBaseRoles.end(), *role) ==
            kBaseRoles.end()) {
      if (error) *error = "unknown shell cluster: " + token;
      return std::nullopt;
    }
    sel.base_roles.insert(*role);
  }
  return sel;
}

std::vector<AdaptedCluster> adapt(const ShellSelection& selection, uint32_t f,
                                  std::string* error) {
  for (auto role : selection.base_roles) {
    if (std::find(kBaseRoles.begin(), kBaseRoles.end(), role) ==
        kBaseRoles.end()) {
      if (error) *error = std::string("not a base cluster: ") + std::string(role_name(role));
      return {};
    }
  }
  const auto& shell = selection.base_roles;
  auto in_shell = [&shell](ClusterRole role) { return shell.count(role) != 0; };
  const uint32_t f1 = f + 1;
  const uint32_t f2 = 2 * f + 1;
  const uint32_t f3 = 3 * f + 1;

  std::vector<AdaptedCluster> out;
  out.push_back({ClusterRole::FrontEnd, f2, false, in_shell(ClusterRole::FrontEnd)});
  out.push_back({ClusterRole::Proposer, f1, false, in_shell(ClusterRole::Proposer)});
  bool agreement_stage = in_shell(ClusterRole::Proposer);
  if (agreement_stage) {
    out.push_back({ClusterRole::Preparer, f3, false,
                   selection.added_clusters_shell});
  }
  {
    bool s = in_shell(ClusterRole::Committer);
    out.push_back({ClusterRole::Committer, s ? f3 : f2, s, s});
  }
  {
    bool s = in_shell(ClusterRole::Executor);
    out.push_back({ClusterRole::Executor, s ? f3 : f2, s, s});
  }
  out.push_back({ClusterRole::Controller, f2, false, in_shell(ClusterRole::Controller)});
  for (auto monitor : {ClusterRole::AgreementMonitor,
                       ClusterRole::CompletionMonitor,
                       ClusterRole::ViewMonitor}) {
    bool s = in_shell(monitor);
    out.push_back({monitor, s ? f3 : f2, s, s});
  }
  if (agreement_stage) {
    bool extra = selection.added_clusters_shell;
    out.push_back({ClusterRole::Conservator, extra ? f3 : f2, extra, extra});
    // The curator leads view changes and joins the shell alongside the
    // proposer; leader clusters keep size f+1.
    out.push_back({ClusterRole::Curator, f1, false, true});
    out.push_back({ClusterRole::Auditor, f3, false, extra});
    out.push_back({ClusterRole::RecordKeeper, extra ? f3 : f2, extra, extra});
  }
  return out;
}

DependencyGraph generate_edges(bool has_preparer, ViewChangeMode vc_mode) {
  using R = ClusterRole;
  using K = MessageKind;
  DependencyGraph edges = {
      {R::FrontEnd, R::FrontEnd, K::CommandGossip},
      {R::FrontEnd, R::Proposer, K::CommandOffer},
      {R::FrontEnd, R::Controller, K::SubmissionProgress},
      {R::Committer, R::Executor, K::Confirm},
      {R::Committer, R::AgreementMonitor, K::AgreementReport},
      {R::Executor, R::CompletionMonitor, K::CompletionReport},
      {R::Executor, R::Executor, K::CheckpointRequest},
      {R::Executor, R::Executor, K::CheckpointResponse},
      {R::Controller, R::ViewMonitor, K::ViewAnnounce},
      {R::AgreementMonitor, R::AgreementMonitor, K::MonitorForward},
      {R::CompletionMonitor, R::CompletionMonitor, K::MonitorForward},
      {R::ViewMonitor, R::ViewMonitor, K::MonitorForward},
      {R::AgreementMonitor, R::Proposer, K::MonitorValue},
      {R::AgreementMonitor, R::Committer, K::MonitorValue},
      {R::AgreementMonitor, R::Executor, K::MonitorValue},
      {R::CompletionMonitor, R::Proposer, K::MonitorValue},
      {R::CompletionMonitor, R::Committer, K::MonitorValue},
      {R::CompletionMonitor, R::Executor, K::MonitorValue},
      {R::CompletionMonitor, R::Controller, K::MonitorValue},
      {R::ViewMonitor, R::Proposer, K::MonitorValue},
      {R::ViewMonitor, R::Committer, K::MonitorValue},
      {R::ViewMonitor, R::Executor, K::MonitorValue},
      {R::ViewMonitor, R::Controller, K::MonitorValue},
  };
  if (has_preparer) {
    edges.push_back({R::Proposer, R::Preparer, K::Proposal});
    edges.push_back({R::Preparer, R::Committer, K::PrepareOpinion});
    edges.push_back({R::CompletionMonitor, R::Preparer, K::MonitorValue});
    edges.push_back({R::ViewMonitor, R::Preparer, K::MonitorValue});
  } else {
    edges.push_back({R::Proposer, R::Committer, K::Proposal});
  }
  if (vc_mode == ViewChangeMode::CuratorPipeline) {
    edges.push_back({R::Preparer, R::Conservator, K::PreparedEvidence});
    edges.push_back({R::Committer, R::Conservator, K::CommittedEvidence});
    edges.push_back({R::Conservator, R::Curator, K::ConservatorReport});
    edges.push_back({R::Conservator, R::Auditor, K::ConservatorReport});
    edges.push_back({R::Curator, R::Auditor, K::NewViewProposal});
    edges.push_back({R::Auditor, R::RecordKeeper, K::DecisionVoucher});
    edges.push_back({R::Auditor, R::Controller, K::ViewChangeReject});
    edges.push_back({R::RecordKeeper, R::Proposer, K::DecisionResponse});
    edges.push_back({R::RecordKeeper, R::Preparer, K::DecisionResponse});
    for (auto consumer : {R::Conservator, R::Curator, R::Auditor, R::RecordKeeper}) {
      edges.push_back({R::ViewMonitor, consumer, K::MonitorValue});
    }
  } else {
    edges.push_back({R::Committer, R::Proposer, K::ViewChangeReport});
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::map<ClusterRole, FaultDomain> classify(
    const DependencyGraph& graph, const std::set<ClusterRole>& shell,
    const std::vector<ClusterRole>& clusters) {
  std::map<ClusterRole, FaultDomain> domains;
  for (auto role : clusters) {
    domains[role] = shell.count(role) ? FaultDomain::Shell : FaultDomain::Core;
  }
  for (const auto& edge : graph) {
    if (!shell.count(edge.producer)) continue;
    auto it = domains.find(edge.consumer);
    if (it != domains.end() && it->second == FaultDomain::Core) {
      it->second = FaultDomain::Filter;
    }
  }
  return domains;
}

std::optional<SystemBlueprint> configure(const ShellSelection& selection,
                                         uint32_t f, std::string* error) {
  auto adapted = adapt(selection, f, error);
  if (adapted.empty()) return std::nullopt;

  SystemBlueprint bp;
  bp.f = f;
  bp.preset = selection.preset;
  bp.has_preparer = selection.base_roles.count(ClusterRole::Proposer) != 0;
  if (bp.has_preparer) {
    bp.vc_mode = ViewChangeMode::CuratorPipeline;
  } else if (selection.base_roles.count(ClusterRole::Committer)) {
    bp.vc_mode = ViewChangeMode::AdaptedProposer;
  } else {
    bp.vc_mode = ViewChangeMode::Base;
  }

  std::vector<ClusterRole> roles;
  for (const auto& c : adapted) {
    roles.push_back(c.role);
    if (c.in_shell) bp.shell.insert(c.role);
  }
  bp.edges = generate_edges(bp.has_preparer, bp.vc_mode);
  auto domains = classify(bp.edges, bp.shell, roles);
  for (const auto& c : adapted) {
    bp.clusters.push_back(ClusterSpec{c.role, c.size, domains[c.role], c.expanded});
  }

  auto expanded = [&bp](ClusterRole role) {
    const auto* c = bp.find_cluster(role);
    return c != nullptr && c->expanded;
  };
  const uint32_t f1 = f + 1;
  const uint32_t f2 = 2 * f + 1;
  auto raise = [f](uint32_t base, bool producer_expanded) {
    return producer_expanded ? base + f : base;
  };

  Thresholds t;
  t.commit = raise(f1, expanded(ClusterRole::Committer));
  t.commit_match = bp.shell.count(ClusterRole::Committer) != 0;
  t.prepare_opinion = bp.has_preparer ? f2 : 0;
  t.reply = raise(1, expanded(ClusterRole::Executor));
  t.checkpoint = raise(1, expanded(ClusterRole::Executor));
  t.ts_agreement = raise(f1, expanded(ClusterRole::Committer));
  t.ts_completion = raise(f1, expanded(ClusterRole::Executor));
  t.ts_view = f1;
  t.peer_agreement = raise(1, expanded(ClusterRole::AgreementMonitor));
  t.peer_completion = raise(1, expanded(ClusterRole::CompletionMonitor));
  t.peer_view = raise(1, expanded(ClusterRole::ViewMonitor));
  t.obs_agreement = raise(f1, expanded(ClusterRole::AgreementMonitor));
  t.obs_completion = raise(f1, expanded(ClusterRole::CompletionMonitor));
  t.obs_view = raise(f1, expanded(ClusterRole::ViewMonitor));
  t.submission = f1;  // front ends never grow (no size update for a shell front end)
  t.vc_reports = raise(f1, expanded(ClusterRole::Committer));
  t.vc_support = bp.vc_mode == ViewChangeMode::AdaptedProposer ? f1 : 0;
  if (bp.has_preparer) {
    t.ev_preparer = f2;
    t.ev_committer = raise(f1, expanded(ClusterRole::Committer));
    t.ev_committer_support = raise(1, expanded(ClusterRole::Committer));
    t.curator_reports = raise(f1, expanded(ClusterRole::Conservator));
    t.cert_support = raise(1, expanded(ClusterRole::Conservator));
    t.voucher = f2;
    t.decision = raise(f1, expanded(ClusterRole::RecordKeeper));
    t.reject = f1;
  }
  bp.thresholds = t;

  // Two machine groups; replica i of every cluster in a group shares
  // machine i, so no cluster ever co-locates two of its own replicas.
  auto pack = [&bp](const std::string& group, bool shell_side) {
    uint32_t machines = 0;
    for (const auto& c : bp.clusters) {
      bool is_shell = c.domain == FaultDomain::Shell;
      if (is_shell == shell_side) machines = std::max(machines, c.size);
    }
    for (uint32_t m = 0; m < machines; ++m) {
      DeploymentMachine machine{group, m, {}};
      for (const auto& c : bp.clusters) {
        bool is_shell = c.domain == FaultDomain::Shell;
        if (is_shell == shell_side && m < c.size) {
          machine.hosts.push_back(ReplicaId{c.role, m});
        }
      }
      bp.machines.push_back(std::move(machine));
    }
  };
  pack("shell", true);
  pack("filtercore", false);

  for (const auto& c : bp.clusters) {
    for (uint32_t i = 0; i < c.size; ++i) {
      ReplicaId id{c.role, i};
      if (c.domain == FaultDomain::Shell) {
        bp.diversity[id] =
            "div-" + std::string(role_name(c.role)) + "-" + std::to_string(i);
      } else {
        bp.diversity[id] = "default";
      }
    }
  }
  return bp;
}

std::string blueprint_report(const SystemBlueprint& bp) {
  std::ostringstream out;
  out << "tailored system: f=" << bp.f;
  if (!bp.preset.empty()) out << " preset=" << bp.preset;
  out << "\n";
  out << "shell selection:";
  if (bp.shell.empty()) out << " (none: crash-tolerant base protocol)";
  for (auto role : bp.shell) out << " " << role_name(role);
  out << "\n";
  out << "view change: " << vc_mode_name(bp.vc_mode) << "\n";
  out << "clusters:\n";
  for (const auto& c : bp.clusters) {
    out << "  " << role_name(c.role) << " size=" << c.size << " domain="
        << domain_name(c.domain) << (c.expanded ? " (expanded)" : "") << "\n";
  }
  out << "deployment:\n";
  for (const auto& m : bp.machines) {
    out << "  " << m.group << "/" << m.index << ":";
    for (const auto& host : m.hosts) out << " " << host.str();
    out << "\n";
  }
  out << "totals: replicas=" << bp.total_replicas()
      << " shell=" << bp.shell_replicas() << "\n";
  return out.str();
}

}  // namespace shellft::tailor
