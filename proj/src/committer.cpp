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

#include "shellft/proto/machines.hpp"

namespace shellft::proto {

CommitterReplica::CommitterReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys),
      window_(sys.params().window_capacity),
      agreement_obs_(LoopKind::Agreement, sys.thresholds().obs_agreement),
      completion_obs_(LoopKind::Completion, sys.thresholds().obs_completion),
      view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void CommitterReplica::accept_entry(uint64_t seq, uint64_t view,
                                    const Command& cmd, Context& ctx) {
  (void)ctx;
  auto& slot = window_.slot(seq);
  slot.has = true;
  slot.view = view;
  slot.digest = digest_of(cmd);
  slot.cmd = cmd;
  slot.opinions.erase(slot.opinions.begin(), slot.opinions.upper_bound(view));
  dirty_.insert(seq);
  active_high_ = std::max(active_high_, seq + 1);
  vc_pending_ = false;
}

void CommitterReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::Proposal: {
      if (sys().bp->has_preparer) return;  // proposals flow via preparers
      const auto* body = env.as<ProposalBody>();
      if (body == nullptr || body->view != view_) return;
      if (env.sender.cluster != ClusterRole::Proposer ||
          env.sender.index != sys().leader_of(body->view)) {
        return;
      }
      for (const auto& slot : body->slots) {
        if (!window_.in_range(slot.seq)) continue;
        const auto* existing = window_.find(slot.seq);
        if (existing != nullptr && existing->has &&
            existing->view >= body->view) {
          continue;  // first write wins within a view
        }
        accept_entry(slot.seq, body->view, slot.cmd, ctx);
      }
      return;
    }
    case MessageKind::PrepareOpinion: {
      if (!sys().bp->has_preparer) return;
      if (env.sender.cluster != ClusterRole::Preparer) return;
      const auto* body = env.as<PrepareOpinionBody>();
      if (body == nullptr) return;
      for (const auto& entry : body->entries) {
        if (entry.view != view_) continue;
        if (!window_.in_range(entry.seq)) continue;
        auto& slot = window_.slot(entry.seq);
        if (slot.has && slot.view >= entry.view) continue;
        auto& opinions = slot.opinions[entry.view];
        opinions[env.sender] = {digest_of(entry.cmd), entry.cmd};
        // Accept once 2f+1 preparers submitted matching opinions.
        std::map<Digest, uint32_t> counts;
        for (const auto& [preparer, opinion] : opinions) {
          ++counts[opinion.first];
        }
        for (const auto& [digest, count] : counts) {
          if (count < sys().thresholds().prepare_opinion) continue;
          for (const auto& [preparer, opinion] : opinions) {
            if (opinion.first == digest) {
              accept_entry(entry.seq, entry.view, opinion.second, ctx);
              break;
            }
          }
          break;
        }
      }
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr) return;
      if (body->loop == LoopKind::View) {
        view_obs_.feed(env.sender, *body);
        if (view_obs_.value() > view_) {
          view_ = view_obs_.value();
          vc_pending_ = true;
          vc_ticks_ = 0;
        }
      } else if (body->loop == LoopKind::Completion) {
        completion_obs_.feed(env.sender, *body);
        uint64_t stable = sys().stable_checkpoint(completion_obs_.value());
        if (stable > window_.low()) {
          window_.shift(stable);
          while (!dirty_.empty() && *dirty_.begin() < window_.low()) {
            dirty_.erase(dirty_.begin());
          }
        }
      } else {
        agreement_obs_.feed(env.sender, *body);
      }
      return;
    }
    default:
      return;
  }
}

void CommitterReplica::on_tick(Context& ctx) {
  ++ticks_;
  bool full = (ticks_ + id_.index) % kResyncTicks == 0;
  ConfirmBody confirms;
  auto add = [this, &confirms](uint64_t seq) {
    const auto* slot = window_.find(seq);
    if (slot != nullptr && slot->has) {
      confirms.entries.push_back(SlotEntry{slot->view, seq, slot->cmd});
    }
  };
  if (full) {
    for (const auto& [seq, slot] : window_.slots()) add(seq);
  } else {
    for (uint64_t seq : dirty_) add(seq);
  }
  dirty_.clear();
  if (!confirms.entries.empty()) {
    ctx.out.broadcast(ClusterRole::Executor, MessageKind::Confirm,
                      std::move(confirms));
  }
  ctx.out.broadcast(ClusterRole::AgreementMonitor, MessageKind::AgreementReport,
                    AgreementReportBody{active_high_});
  if (vc_pending_ && vc_ticks_ < kEvidenceTicks) {
    ++vc_ticks_;
    SlotHistoryBody history;
    history.target_view = view_;
    for (const auto& [seq, slot] : window_.slots()) {
      if (slot.has) {
        history.entries.push_back(SlotEntry{slot.view, seq, slot.cmd});
      }
    }
    if (sys().bp->vc_mode == tailor::ViewChangeMode::CuratorPipeline) {
      ctx.out.broadcast(ClusterRole::Conservator,
                        MessageKind::CommittedEvidence, std::move(history));
    } else {
      ctx.out.broadcast(ClusterRole::Proposer, MessageKind::ViewChangeReport,
                        std::move(history));
    }
  }
}

}  // namespace shellft::proto
