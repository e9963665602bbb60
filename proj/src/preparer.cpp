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

PreparerReplica::PreparerReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys),
      window_(sys.params().window_capacity),
      completion_obs_(LoopKind::Completion, sys.thresholds().obs_completion),
      view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void PreparerReplica::try_install_decision(uint64_t view, Context& ctx) {
  (void)ctx;
  for (const auto& [digest, votes] : decision_votes_) {
    if (votes.size() < sys().thresholds().decision) continue;
    const auto& decision = decision_bodies_.at(digest);
    if (decision.view != view_) return;
    // The agreed re-propose set supersedes whatever was first-accepted for
    // the new view.
    for (const auto& slot : decision.repropose) {
      if (!window_.in_range(slot.seq)) continue;
      window_.slot(slot.seq) =
          PrepSlot{view_, digest_of(slot.cmd), slot.cmd};
      dirty_.insert(slot.seq);
    }
    decided_views_.insert(view);
    vc_pending_ = false;
    return;
  }
}

void PreparerReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::Proposal: {
      const auto* body = env.as<ProposalBody>();
      if (body == nullptr) return;
      if (body->view != view_) return;  // stale or premature
      if (env.sender.cluster != ClusterRole::Proposer ||
          env.sender.index != sys().leader_of(body->view)) {
        return;
      }
      const NewViewDecision* decision = nullptr;
      if (decided_views_.count(view_)) {
        for (const auto& [d, votes] : decision_votes_) {
          if (votes.size() >= sys().thresholds().decision) {
            decision = &decision_bodies_.at(d);
            break;
          }
        }
      }
      for (const auto& slot : body->slots) {
        if (!window_.in_range(slot.seq)) continue;
        auto* existing = window_.find(slot.seq);
        if (existing != nullptr && existing->view >= body->view) {
          continue;  // first proposal per view wins
        }
        if (decision != nullptr) {
          // Proposals for decided slots must match the decision.
          bool conflicting = false;
          for (const auto& decided : decision->repropose) {
            if (decided.seq == slot.seq &&
                digest_of(decided.cmd) != digest_of(slot.cmd)) {
              conflicting = true;
              break;
            }
          }
          if (conflicting) continue;
        }
        window_.slot(slot.seq) =
            PrepSlot{body->view, digest_of(slot.cmd), slot.cmd};
        dirty_.insert(slot.seq);
        vc_pending_ = false;
      }
      return;
    }
    case MessageKind::DecisionResponse: {
      if (env.sender.cluster != ClusterRole::RecordKeeper) return;
      const auto* body = env.as<DecisionResponseBody>();
      if (body == nullptr || body->decision.view != view_) return;
      Digest d = digest_of(body->decision);
      decision_bodies_.emplace(d, body->decision);
      decision_votes_[d].insert(env.sender);
      try_install_decision(view_, ctx);
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
          decision_votes_.clear();
          decision_bodies_.clear();
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
      }
      return;
    }
    default:
      return;
  }
}

void PreparerReplica::on_tick(Context& ctx) {
  ++ticks_;
  bool full = (ticks_ + id_.index) % kResyncTicks == 0;
  PrepareOpinionBody body;
  if (full) {
    for (const auto& [seq, slot] : window_.slots()) {
      body.entries.push_back(SlotEntry{slot.view, seq, slot.cmd});
    }
  } else {
    for (uint64_t seq : dirty_) {
      if (const auto* slot = window_.find(seq)) {
        body.entries.push_back(SlotEntry{slot->view, seq, slot->cmd});
      }
    }
  }
  dirty_.clear();
  if (!body.entries.empty()) {
    ctx.out.broadcast(ClusterRole::Committer, MessageKind::PrepareOpinion,
                      std::move(body));
  }
  if (vc_pending_ && vc_ticks_ < kEvidenceTicks) {
    ++vc_ticks_;
    SlotHistoryBody evidence;
    evidence.target_view = view_;
    for (const auto& [seq, slot] : window_.slots()) {
      evidence.entries.push_back(SlotEntry{slot.view, seq, slot.cmd});
    }
    ctx.out.broadcast(ClusterRole::Conservator, MessageKind::PreparedEvidence,
                      std::move(evidence));
  }
}

}  // namespace shellft::proto
