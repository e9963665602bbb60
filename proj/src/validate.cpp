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

#include <algorithm>
#include <set>
#include <sstream>

#include "shellft/tailor/tailor.hpp"

namespace shellft::tailor {

namespace {

void check(std::vector<std::string>& problems, bool ok, const std::string& msg) {
  if (!ok) problems.push_back(msg);
}

}  // namespace

std::vector<std::string> validate_blueprint(const SystemBlueprint& bp) {
  std::vector<std::string> problems;
  const uint32_t f = bp.f;
  const uint32_t f1 = f + 1;
  const uint32_t f2 = 2 * f + 1;
  const uint32_t f3 = 3 * f + 1;

  // Cluster sizes per the adaptation rules.
  for (const auto& c : bp.clusters) {
    bool shell = bp.shell.count(c.role) != 0;
    uint32_t expect = 0;
    bool expect_expanded = false;
    switch (c.role) {
      case ClusterRole::FrontEnd:
      case ClusterRole::Controller:
        expect = f2;
        break;
      case ClusterRole::Proposer:
      case ClusterRole::Curator:
        expect = f1;
        break;
      case ClusterRole::Preparer:
      case ClusterRole::Auditor:
        expect = f3;
        break;
      case ClusterRole::Committer:
      case ClusterRole::Executor:
      case ClusterRole::AgreementMonitor:
      case ClusterRole::CompletionMonitor:
      case ClusterRole::ViewMonitor:
        expect = shell ? f3 : f2;
        expect_expanded = shell;
        break;
      case ClusterRole::Conservator:
      case ClusterRole::RecordKeeper:
        expect = shell ? f3 : f2;
        expect_expanded = shell;
        break;
      default:
        problems.push_back("unexpected cluster: " +
                           std::string(role_name(c.role)));
        continue;
    }
    check(problems, c.size == expect,
          std::string(role_name(c.role)) + ": size " + std::to_string(c.size) +
              ", expected " + std::to_string(expect));
    check(problems, c.expanded == expect_expanded,
          std::string(role_name(c.role)) + ": expanded flag wrong");
    check(problems, (c.domain == FaultDomain::Shell) == shell,
          std::string(role_name(c.role)) + ": shell/domain mismatch");
  }

  // Classification over the generated graph.
  check(problems, bp.edges == generate_edges(bp.has_preparer, bp.vc_mode),
        "edge set does not match generated dependency graph");
  std::vector<ClusterRole> roles;
  for (const auto& c : bp.clusters) roles.push_back(c.role);
  auto domains = classify(bp.edges, bp.shell, roles);
  for (const auto& c : bp.clusters) {
    check(problems, domains[c.role] == c.domain,
          std::string(role_name(c.role)) + ": classified as " +
              std::string(domain_name(domains[c.role])) + " but recorded " +
              std::string(domain_name(c.domain)));
  }

  // Threshold arithmetic: base value +f when the producer was expanded.
  auto expanded = [&bp](ClusterRole role) {
    const auto* c = bp.find_cluster(role);
    return c != nullptr && c->expanded;
  };
  auto raise = [f](uint32_t base, bool e) { return e ? base + f : base; };
  const auto& t = bp.thresholds;
  check(problems, t.commit == raise(f1, expanded(ClusterRole::Committer)),
        "commit threshold wrong");
  check(problems,
        t.commit_match == (bp.shell.count(ClusterRole::Committer) != 0),
        "commit matching mode wrong");
  check(problems, t.reply == raise(1, expanded(ClusterRole::Executor)),
        "reply threshold wrong");
  check(problems, t.checkpoint == raise(1, expanded(ClusterRole::Executor)),
        "checkpoint threshold wrong");
  check(problems, t.ts_completion == raise(f1, expanded(ClusterRole::Executor)),
        "completion source threshold wrong");
  check(problems, t.ts_agreement == raise(f1, expanded(ClusterRole::Committer)),
        "agreement source threshold wrong");
  check(problems, t.ts_view == f1, "view source threshold wrong");
  check(problems, t.submission == f1,
        "submission threshold must stay f+1 (front ends never grow)");
  check(problems,
        t.obs_agreement == raise(f1, expanded(ClusterRole::AgreementMonitor)) &&
            t.obs_completion == raise(f1, expanded(ClusterRole::CompletionMonitor)) &&
            t.obs_view == raise(f1, expanded(ClusterRole::ViewMonitor)),
        "observer thresholds wrong");
  check(problems,
        t.peer_agreement == raise(1, expanded(ClusterRole::AgreementMonitor)) &&
            t.peer_completion == raise(1, expanded(ClusterRole::CompletionMonitor)) &&
            t.peer_view == raise(1, expanded(ClusterRole::ViewMonitor)),
        "peer thresholds wrong");
  check(problems, t.vc_reports == raise(f1, expanded(ClusterRole::Committer)),
        "view-change report threshold wrong");
  if (bp.has_preparer) {
    check(problems, t.prepare_opinion == f2, "prepare opinion threshold wrong");
    check(problems, t.ev_preparer == f2, "preparer evidence threshold wrong");
    check(problems,
          t.ev_committer == raise(f1, expanded(ClusterRole::Committer)),
          "committer evidence threshold wrong");
    check(problems,
          t.curator_reports == raise(f1, expanded(ClusterRole::Conservator)),
          "curator report threshold wrong");
    check(problems, t.voucher == f2, "voucher threshold wrong");
    check(problems,
          t.decision == raise(f1, expanded(ClusterRole::RecordKeeper)),
          "decision threshold wrong");
  }

  // Thresholds never exceed what the producing cluster can deliver.
  auto within = [&](uint32_t threshold, ClusterRole producer, const char* what) {
    if (threshold == 0) return;
    check(problems, threshold <= bp.size_of(producer),
          std::string(what) + " exceeds producer size");
  };
  within(t.commit, ClusterRole::Committer, "commit");
  within(t.prepare_opinion, ClusterRole::Preparer, "prepare_opinion");
  within(t.reply, ClusterRole::Executor, "reply");
  within(t.checkpoint, ClusterRole::Executor, "checkpoint");
  within(t.ts_agreement, ClusterRole::Committer, "ts_agreement");
  within(t.ts_completion, ClusterRole::Executor, "ts_completion");
  within(t.ts_view, ClusterRole::Controller, "ts_view");
  within(t.obs_agreement, ClusterRole::AgreementMonitor, "obs_agreement");
  within(t.obs_completion, ClusterRole::CompletionMonitor, "obs_completion");
  within(t.obs_view, ClusterRole::ViewMonitor, "obs_view");
  within(t.submission, ClusterRole::FrontEnd, "submission");
  within(t.vc_reports, ClusterRole::Committer, "vc_reports");
  if (bp.has_preparer) {
    within(t.ev_committer, ClusterRole::Committer, "ev_committer");
    within(t.curator_reports, ClusterRole::Conservator, "curator_reports");
    within(t.voucher, ClusterRole::Auditor, "voucher");
    within(t.decision, ClusterRole::RecordKeeper, "decision");
  }

  // Deployment: two disjoint groups, every replica placed exactly once,
  // no cluster co-locating two of its own replicas, shell replicas never
  // sharing a machine with filter/core replicas.
  std::map<ReplicaId, int> placed;
  for (const auto& m : bp.machines) {
    check(problems, m.group == "shell" || m.group == "filtercore",
          "unknown machine group: " + m.group);
    std::set<ClusterRole> seen;
    for (const auto& host : m.hosts) {
      ++placed[host];
      check(problems, seen.insert(host.cluster).second,
            "two replicas of " + std::string(role_name(host.cluster)) +
                " share machine " + m.group + "/" + std::to_string(m.index));
      bool host_shell = bp.shell.count(host.cluster) != 0;
      check(problems, host_shell == (m.group == "shell"),
            host.str() + " placed in wrong group");
    }
  }
  for (const auto& c : bp.clusters) {
    for (uint32_t i = 0; i < c.size; ++i) {
      ReplicaId id{c.role, i};
      check(problems, placed[id] == 1, id.str() + " placed " +
                                           std::to_string(placed[id]) +
                                           " times");
    }
  }

  // Diversity labels: distinct per shell replica, shared elsewhere.
  std::set<std::string> shell_labels;
  for (const auto& c : bp.clusters) {
    for (uint32_t i = 0; i < c.size; ++i) {
      ReplicaId id{c.role, i};
      auto it = bp.diversity.find(id);
      if (it == bp.diversity.end()) {
        problems.push_back(id.str() + " has no diversity label");
        continue;
      }
      if (c.domain == FaultDomain::Shell) {
        check(problems, shell_labels.insert(it->second).second,
              "duplicate shell diversity label: " + it->second);
      } else {
        check(problems, it->second == "default",
              id.str() + " should use the default configuration label");
      }
    }
  }
  return problems;
}

}  // namespace shellft::tailor
