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

ProposerReplica::ProposerReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys),
      window_(sys.params().window_capacity),
      agreement_obs_(LoopKind::Agreement, sys.thresholds().obs_agreement),
      completion_obs_(LoopKind::Completion, sys.thresholds().obs_completion),
      view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void ProposerReplica::adopt_view(uint64_t view, Context& ctx) {
  if (view <= view_) return;
  view_ = view;
  vc_reports_.clear();
  decision_votes_.clear();
  decision_bodies_.clear();
  if (is_leader()) {
    // The new leader must learn every possibly committed value before
    // assigning fresh commands in this view.
    mode_ = Mode::ViewChange;
  } else {
    mode_ = Mode::Normal;
  }
  (void)ctx;
}

void ProposerReplica::install_repropose(const std::vector<SlotCommand>& slots,
                                        Context& ctx) {
  uint64_t past_end = next_seq_;
  for (const auto& slot : slots) {
    if (!window_.in_range(slot.seq)) continue;
    auto& entry = window_.slot(slot.seq);
    entry = ProposalSlot{view_, slot.cmd};
    if (!slot.cmd.is_noop()) {
      in_window_.insert({slot.cmd.client, slot.cmd.counter});
    }
    dirty_.insert(slot.seq);
    past_end = std::max(past_end, slot.seq + 1);
  }
  // Re-stamp everything still windowed with the current view so the
  // outgoing proposal batch is uniform.
  for (auto& [seq, entry] : window_.slots()) {
    if (entry.view != view_) {
      entry.view = view_;
      dirty_.insert(seq);
    }
  }
  next_seq_ = std::max({past_end, window_.low(), agreement_obs_.value()});
  mode_ = Mode::Normal;
  full_flush_until_ = ticks_ + kPostVcFlushTicks;
  ctx.events.new_view(id_, view_);
}

void ProposerReplica::try_complete_history_vc(Context& ctx) {
  if (vc_reports_.size() < sys().thresholds().vc_reports) return;
  const uint32_t support = sys().thresholds().vc_support;
  // Union of reported slots; per slot the highest-view claim wins. The
  // adapted proposer additionally discards claims lacking enough matching
  // committer support (shell committers may fabricate).
  struct Claim {
    uint64_t view;
    Digest digest;
    const Command* cmd;
    uint32_t count = 0;
  };
  std::map<uint64_t, std::vector<Claim>> claims;
  for (const auto& [committer, report] : vc_reports_) {
    for (const auto& entry : report.entries) {
      if (!window_.in_range(entry.seq)) continue;  // bounds fabrications too
      auto& list = claims[entry.seq];
      Digest d = digest_of(entry.cmd);
      bool found = false;
      for (auto& claim : list) {
        if (claim.view == entry.view && claim.digest == d) {
          ++claim.count;
          found = true;
          break;
        }
      }
      if (!found) list.push_back(Claim{entry.view, d, &entry.cmd, 1});
    }
  }
  std::map<uint64_t, SlotCommand> by_seq;
  for (const auto& [seq, list] : claims) {
    const Claim* best = nullptr;
    for (const auto& claim : list) {
      if (support > 0 && claim.count < support) continue;
      if (best == nullptr || claim.view > best->view ||
          (claim.view == best->view && claim.digest < best->digest)) {
        best = &claim;
      }
    }
    if (best != nullptr) by_seq.emplace(seq, SlotCommand{seq, *best->cmd});
  }
  std::vector<SlotCommand> chosen;
  if (!claims.empty()) {
    // Every slot up to the highest claimed one is re-proposed; slots with
    // no (sufficiently supported) value become no-ops.
    uint64_t max_seq = claims.rbegin()->first;
    for (uint64_t seq = window_.low(); seq <= max_seq; ++seq) {
      auto it = by_seq.find(seq);
      if (it != by_seq.end()) {
        chosen.push_back(std::move(it->second));
      } else {
        chosen.push_back(SlotCommand{seq, Command::noop(seq)});
      }
    }
  }
  install_repropose(chosen, ctx);
}

void ProposerReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::CommandOffer: {
      if (env.sender.cluster != ClusterRole::FrontEnd) return;
      if (const auto* body = env.as<CommandOfferBody>()) {
        for (const auto& cmd : body->commands) {
          if (cmd.is_noop()) continue;
          if (seen_.insert({cmd.client, cmd.counter}).second) {
            pending_.push_back(cmd);
          }
        }
      }
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr) return;
      switch (body->loop) {
        case LoopKind::View:
          view_obs_.feed(env.sender, *body);
          if (view_obs_.value() > view_) adopt_view(view_obs_.value(), ctx);
          break;
        case LoopKind::Completion: {
          completion_obs_.feed(env.sender, *body);
          uint64_t stable = sys().stable_checkpoint(completion_obs_.value());
          if (stable > window_.low()) {
            window_.shift(stable);
            in_window_.clear();
            for (const auto& [seq, slot] : window_.slots()) {
              if (!slot.cmd.is_noop()) {
                in_window_.insert({slot.cmd.client, slot.cmd.counter});
              }
            }
            while (!dirty_.empty() && *dirty_.begin() < window_.low()) {
              dirty_.erase(dirty_.begin());
            }
            next_seq_ = std::max(next_seq_, window_.low());
          }
          break;
        }
        case LoopKind::Agreement:
          agreement_obs_.feed(env.sender, *body);
          if (mode_ == Mode::Normal) {
            next_seq_ = std::max(next_seq_, agreement_obs_.value());
          }
          break;
      }
      return;
    }
    case MessageKind::ViewChangeReport: {
      if (env.sender.cluster != ClusterRole::Committer) return;
      if (mode_ != Mode::ViewChange || !is_leader()) return;
      if (sys().bp->vc_mode == tailor::ViewChangeMode::CuratorPipeline) return;
      const auto* body = env.as<SlotHistoryBody>();
      if (body == nullptr || body->target_view != view_) return;
      vc_reports_[env.sender] = *body;
      try_complete_history_vc(ctx);
      return;
    }
    case MessageKind::DecisionResponse: {
      if (env.sender.cluster != ClusterRole::RecordKeeper) return;
      if (mode_ != Mode::ViewChange || !is_leader()) return;
      const auto* body = env.as<DecisionResponseBody>();
      if (body == nullptr || body->decision.view != view_) return;
      Digest d = digest_of(body->decision);
      decision_bodies_.emplace(d, body->decision);
      auto& votes = decision_votes_[d];
      votes.insert(env.sender);
      if (votes.size() >= sys().thresholds().decision) {
        install_repropose(decision_bodies_.at(d).repropose, ctx);
      }
      return;
    }
    default:
      return;
  }
}

void ProposerReplica::assign_pending(Context& ctx) {
  (void)ctx;
  while (!pending_.empty() && window_.in_range(next_seq_)) {
    Command cmd = std::move(pending_.front());
    pending_.pop_front();
    auto key = std::make_pair(cmd.client, cmd.counter);
    if (in_window_.count(key)) continue;  // already holds a slot
    in_window_.insert(key);
    window_.slot(next_seq_) = ProposalSlot{view_, std::move(cmd)};
    dirty_.insert(next_seq_);
    ++next_seq_;
  }
}

void ProposerReplica::flush(Context& ctx, bool full) {
  if (window_.empty()) return;
  ProposalBody body;
  body.view = view_;
  if (full) {
    for (const auto& [seq, slot] : window_.slots()) {
      body.slots.push_back(SlotCommand{seq, slot.cmd});
    }
  } else {
    for (uint64_t seq : dirty_) {
      if (const auto* slot = window_.find(seq)) {
        body.slots.push_back(SlotCommand{seq, slot->cmd});
      }
    }
  }
  dirty_.clear();
  if (body.slots.empty()) return;
  ctx.out.broadcast(sys().proposal_target(), MessageKind::Proposal,
                    std::move(body));
}

void ProposerReplica::on_tick(Context& ctx) {
  ++ticks_;
  if (mode_ != Mode::Normal || !is_leader()) return;
  assign_pending(ctx);
  bool full = ticks_ <= full_flush_until_ ||
              (ticks_ + id_.index) % kResyncTicks == 0;
  flush(ctx, full);
}

}  // namespace shellft::proto
