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

#include "shellft/proto/machines.hpp"

namespace shellft::proto {

MergedEvidence merge_reports(
    const std::map<ReplicaId, ConservatorReportBody>& reports,
    uint32_t cert_support) {
  struct Claim {
    SlotEntry entry;
    Digest digest;
    uint32_t count = 0;
  };
  auto merge = [cert_support](auto select) {
    std::map<uint64_t, SlotEntry> out;
    std::map<uint64_t, std::vector<Claim>> claims;
    for (const auto& [conservator, report] : select) {
      for (const auto& entry : report) {
        auto& list = claims[entry.seq];
        Digest d = digest_of(entry.cmd);
        bool found = false;
        for (auto& claim : list) {
          if (claim.entry.view == entry.view && claim.digest == d) {
            ++claim.count;
            found = true;
            break;
          }
        }
        if (!found) list.push_back(Claim{entry, d, 1});
      }
    }
    for (const auto& [seq, list] : claims) {
      const Claim* best = nullptr;
      for (const auto& claim : list) {
        if (claim.count < cert_support) continue;
        if (best == nullptr || claim.entry.view > best->entry.view ||
            (claim.entry.view == best->entry.view &&
             claim.digest < best->digest)) {
          best = &claim;
        }
      }
      if (best != nullptr) out.emplace(seq, best->entry);
    }
    return out;
  };
  MergedEvidence evidence;
  {
    std::map<ReplicaId, std::vector<SlotEntry>> certified, prepared;
    for (const auto& [id, report] : reports) {
      certified[id] = report.certified;
      prepared[id] = report.prepared;
    }
    evidence.certified = merge(certified);
    evidence.prepared = merge(prepared);
  }
  return evidence;
}

ConservatorReplica::ConservatorReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys), view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void ConservatorReplica::try_assemble(Context& ctx) {
  (void)ctx;
  if (assembled_ || !active_) return;
  const auto& t = sys().thresholds();
  if (prepared_.size() < t.ev_preparer || committed_.size() < t.ev_committer) {
    return;
  }
  report_ = ConservatorReportBody{};
  report_.target_view = view_;
  // Certified: per slot the highest-view value enough committers accepted.
  struct Claim {
    SlotEntry entry;
    Digest digest;
    uint32_t count = 0;
  };
  auto reduce = [](const std::map<ReplicaId, SlotHistoryBody>& inputs,
                   uint32_t support) {
    std::map<uint64_t, SlotEntry> out;
    std::map<uint64_t, std::vector<Claim>> claims;
    for (const auto& [source, history] : inputs) {
      for (const auto& entry : history.entries) {
        auto& list = claims[entry.seq];
        Digest d = digest_of(entry.cmd);
        bool found = false;
        for (auto& claim : list) {
          if (claim.entry.view == entry.view && claim.digest == d) {
            ++claim.count;
            found = true;
            break;
          }
        }
        if (!found) list.push_back(Claim{entry, d, 1});
      }
    }
    for (const auto& [seq, list] : claims) {
      const Claim* best = nullptr;
      for (const auto& claim : list) {
        if (claim.count < support) continue;
        if (best == nullptr || claim.entry.view > best->entry.view ||
            (claim.entry.view == best->entry.view &&
             claim.digest < best->digest)) {
          best = &claim;
        }
      }
      if (best != nullptr) out.emplace(seq, best->entry);
    }
    return out;
  };
  for (auto& [seq, entry] : reduce(committed_, t.ev_committer_support)) {
    report_.certified.push_back(entry);
  }
  // Prepared values need f+1 matching preparer claims: preparers are
  // Byzantine-capable, a single claim could be fabricated.
  for (auto& [seq, entry] : reduce(prepared_, sys().f() + 1)) {
    report_.prepared.push_back(entry);
  }
  assembled_ = true;
  vc_ticks_ = 0;
}

void ConservatorReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::PreparedEvidence: {
      if (env.sender.cluster != ClusterRole::Preparer) return;
      const auto* body = env.as<SlotHistoryBody>();
      if (body == nullptr || !active_ || body->target_view != view_) return;
      prepared_[env.sender] = *body;
      try_assemble(ctx);
      return;
    }
    case MessageKind::CommittedEvidence: {
      if (env.sender.cluster != ClusterRole::Committer) return;
      const auto* body = env.as<SlotHistoryBody>();
      if (body == nullptr || !active_ || body->target_view != view_) return;
      committed_[env.sender] = *body;
      try_assemble(ctx);
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr || body->loop != LoopKind::View) return;
      view_obs_.feed(env.sender, *body);
      if (view_obs_.value() > view_) {
        view_ = view_obs_.value();
        active_ = true;
        assembled_ = false;
        vc_ticks_ = 0;
        prepared_.clear();
        committed_.clear();
      }
      return;
    }
    default:
      return;
  }
}

void ConservatorReplica::on_tick(Context& ctx) {
  if (!active_ || !assembled_ || vc_ticks_ >= kEvidenceTicks) return;
  ++vc_ticks_;
  ctx.out.broadcast(ClusterRole::Curator, MessageKind::ConservatorReport,
                    Body{report_});
  ctx.out.broadcast(ClusterRole::Auditor, MessageKind::ConservatorReport,
                    Body{report_});
}

CuratorReplica::CuratorReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys), view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void CuratorReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::ConservatorReport: {
      if (env.sender.cluster != ClusterRole::Conservator) return;
      const auto* body = env.as<ConservatorReportBody>();
      if (body == nullptr || body->target_view != view_) return;
      if (sys().curator_of(view_) != id_.index || proposed_) return;
      reports_[env.sender] = *body;
      if (reports_.size() < sys().thresholds().curator_reports) return;
      // Decide: per slot the highest-view certified value, else the
      // prepared value, else a no-op filler.
      auto evidence = merge_reports(reports_, sys().thresholds().cert_support);
      NewViewDecision decision;
      decision.view = view_;
      uint64_t max_seq = 0;
      uint64_t min_seq = UINT64_MAX;
      for (const auto& [seq, entry] : evidence.certified) {
        max_seq = std::max(max_seq, seq);
        min_seq = std::min(min_seq, seq);
      }
      for (const auto& [seq, entry] : evidence.prepared) {
        max_seq = std::max(max_seq, seq);
        min_seq = std::min(min_seq, seq);
      }
      if (min_seq != UINT64_MAX) {
        for (uint64_t seq = min_seq; seq <= max_seq; ++seq) {
          auto cert = evidence.certified.find(seq);
          if (cert != evidence.certified.end()) {
            decision.repropose.push_back(SlotCommand{seq, cert->second.cmd});
            continue;
          }
          auto prep = evidence.prepared.find(seq);
          if (prep != evidence.prepared.end()) {
            decision.repropose.push_back(SlotCommand{seq, prep->second.cmd});
          } else {
            decision.repropose.push_back(SlotCommand{seq, Command::noop(seq)});
          }
        }
      }
      proposed_ = true;
      vc_ticks_ = 0;
      proposal_ = NewViewProposalBody{std::move(decision)};
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr || body->loop != LoopKind::View) return;
      view_obs_.feed(env.sender, *body);
      if (view_obs_.value() > view_) {
        view_ = view_obs_.value();
        reports_.clear();
        proposed_ = false;
        vc_ticks_ = 0;
      }
      return;
    }
    default:
      return;
  }
  (void)ctx;
}

void CuratorReplica::on_tick(Context& ctx) {
  if (!proposed_ || vc_ticks_ >= kEvidenceTicks) return;
  ++vc_ticks_;
  ctx.out.broadcast(ClusterRole::Auditor, MessageKind::NewViewProposal,
                    Body{proposal_});
}

AuditorReplica::AuditorReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys), view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void AuditorReplica::try_verify(Context& ctx) {
  (void)ctx;
  if (decided_ || !candidate_.has_value()) return;
  if (reports_.size() < sys().thresholds().curator_reports) return;
  auto evidence = merge_reports(reports_, sys().thresholds().cert_support);
  // A decision is acceptable unless it drops or replaces a value that my
  // own evidence shows as certified.
  bool consistent = true;
  for (const auto& [seq, entry] : evidence.certified) {
    bool found = false;
    for (const auto& slot : candidate_->repropose) {
      if (slot.seq != seq) continue;
      found = digest_of(slot.cmd) == digest_of(entry.cmd);
      break;
    }
    if (!found) {
      consistent = false;
      break;
    }
  }
  decided_ = true;
  vc_ticks_ = 0;
  if (consistent) {
    vouched_ = true;
    decision_ = *candidate_;
  } else {
    rejected_ = true;
  }
}

void AuditorReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::ConservatorReport: {
      if (env.sender.cluster != ClusterRole::Conservator) return;
      const auto* body = env.as<ConservatorReportBody>();
      if (body == nullptr || body->target_view != view_) return;
      reports_[env.sender] = *body;
      try_verify(ctx);
      return;
    }
    case MessageKind::NewViewProposal: {
      if (env.sender.cluster != ClusterRole::Curator ||
          env.sender.index != sys().curator_of(view_)) {
        return;
      }
      const auto* body = env.as<NewViewProposalBody>();
      if (body == nullptr || body->decision.view != view_) return;
      if (!candidate_.has_value()) candidate_ = body->decision;
      try_verify(ctx);
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr || body->loop != LoopKind::View) return;
      view_obs_.feed(env.sender, *body);
      if (view_obs_.value() > view_) {
        view_ = view_obs_.value();
        reports_.clear();
        candidate_.reset();
        decided_ = vouched_ = rejected_ = false;
        vc_ticks_ = 0;
      }
      return;
    }
    default:
      return;
  }
}

void AuditorReplica::on_tick(Context& ctx) {
  if (!decided_ || vc_ticks_ >= kEvidenceTicks) return;
  ++vc_ticks_;
  if (vouched_) {
    ctx.out.broadcast(ClusterRole::RecordKeeper, MessageKind::DecisionVoucher,
                      DecisionVoucherBody{decision_});
  } else if (rejected_) {
    ctx.out.broadcast(ClusterRole::Controller, MessageKind::ViewChangeReject,
                      ViewChangeRejectBody{view_});
  }
}

RecordKeeperReplica::RecordKeeperReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys), view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void RecordKeeperReplica::on_message(const Envelope& env, Context& ctx) {
  (void)ctx;
  switch (env.kind) {
    case MessageKind::DecisionVoucher: {
      if (env.sender.cluster != ClusterRole::Auditor) return;
      const auto* body = env.as<DecisionVoucherBody>();
      if (body == nullptr || body->decision.view < view_) return;
      uint64_t v = body->decision.view;
      if (stored_.count(v)) return;
      Digest d = digest_of(body->decision);
      auto& votes = votes_[v][d];
      votes.insert(env.sender);
      if (votes.size() >= sys().thresholds().voucher) {
        stored_[v] = body->decision;
        serve_ticks_ = 0;
        votes_.erase(v);
      }
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr || body->loop != LoopKind::View) return;
      view_obs_.feed(env.sender, *body);
      if (view_obs_.value() > view_) {
        view_ = view_obs_.value();
        serve_ticks_ = 0;
        // Decisions for superseded views are kept; only their quorum
        // state is dropped.
        for (auto it = votes_.begin(); it != votes_.end();) {
          it = it->first < view_ ? votes_.erase(it) : std::next(it);
        }
      }
      return;
    }
    default:
      return;
  }
}

void RecordKeeperReplica::on_tick(Context& ctx) {
  auto it = stored_.find(view_);
  if (it == stored_.end() || serve_ticks_ >= kEvidenceTicks) return;
  ++serve_ticks_;
  ctx.out.broadcast(ClusterRole::Proposer, MessageKind::DecisionResponse,
                    DecisionResponseBody{it->second});
  ctx.out.broadcast(ClusterRole::Preparer, MessageKind::DecisionResponse,
                    DecisionResponseBody{it->second});
}

}  // namespace shellft::proto
