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

#include <sstream>

#include "shellft/proto/machines.hpp"

namespace shellft::proto {

namespace {

std::string serialize_checkpoint(
    uint64_t executed_slots, uint64_t executed_commands,
    const std::map<std::pair<uint32_t, uint64_t>, std::string>& replies,
    const app::KvState& app) {
  std::ostringstream out;
  out << executed_slots << ' ' << executed_commands << ' ' << replies.size()
      << '\n';
  for (const auto& [key, reply] : replies) {
    out << key.first << ' ' << key.second << ' ' << reply.size() << ' '
        << reply << '\n';
  }
  out << app.snapshot();
  return out.str();
}

bool restore_checkpoint(
    const std::string& blob, uint64_t& executed_slots,
    uint64_t& executed_commands,
    std::map<std::pair<uint32_t, uint64_t>, std::string>& replies,
    app::KvState& app) {
  std::istringstream in(blob);
  size_t reply_count = 0;
  if (!(in >> executed_slots >> executed_commands >> reply_count)) return false;
  replies.clear();
  for (size_t i = 0; i < reply_count; ++i) {
    uint32_t client = 0;
    uint64_t counter = 0;
    size_t len = 0;
    if (!(in >> client >> counter >> len)) return false;
    if (in.get() != ' ') return false;
    std::string reply(len, '\0');
    in.read(reply.data(), static_cast<std::streamsize>(len));
    if (!in) return false;
    replies[{client, counter}] = std::move(reply);
  }
  in.get();  // newline after the last reply
  std::string rest((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return app.restore(rest);
}

}  // namespace

ExecutorReplica::ExecutorReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys),
      window_(sys.params().window_capacity),
      agreement_obs_(LoopKind::Agreement, sys.thresholds().obs_agreement),
      completion_obs_(LoopKind::Completion, sys.thresholds().obs_completion),
      view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

std::string ExecutorReplica::checkpoint_blob(uint64_t number) const {
  auto it = checkpoints_.find(number);
  return it == checkpoints_.end() ? std::string() : it->second;
}

void ExecutorReplica::handle_confirm_entry(const SlotEntry& entry,
                                           const ReplicaId& from,
                                           Context& ctx) {
  if (entry.seq < executed_slots_ || !window_.in_range(entry.seq)) return;
  auto& slot = window_.slot(entry.seq);
  if (slot.committed) return;
  auto& pv = slot.pending[entry.view];
  Digest digest = digest_of(entry.cmd);
  const auto& t = sys().thresholds();
  if (t.commit_match) {
    // Shell committers: the command must be vouched by `commit` distinct
    // committers with exactly-matching digests.
    auto& [cmd, voters] = pv.by_digest[digest];
    if (voters.empty()) cmd = entry.cmd;
    if (!voters.insert(from).second) return;
    uint32_t quorums = 0;
    for (const auto& [d, entry2] : pv.by_digest) {
      if (entry2.second.size() >= t.commit) ++quorums;
    }
    if (quorums > 1) {
      // Two distinct values both reached the threshold: only possible
      // when the fault assumptions are violated; surfaced, never resolved.
      ctx.events.alarm(id_, "ambiguous commit quorum at seq " +
                                std::to_string(entry.seq));
      return;
    }
    if (voters.size() >= t.commit) {
      commit(entry.seq, entry.view, digest, pv.by_digest[digest].first, ctx);
    }
  } else {
    // Crash-model committers cannot conflict: count confirmations for the
    // coordinate and take the first received value.
    if (!pv.has_candidate) {
      pv.has_candidate = true;
      pv.candidate_digest = digest;
      pv.candidate_cmd = entry.cmd;
    }
    if (!pv.confirmers.insert(from).second) return;
    if (pv.confirmers.size() >= t.commit) {
      commit(entry.seq, entry.view, pv.candidate_digest, pv.candidate_cmd, ctx);
    }
  }
}

void ExecutorReplica::commit(uint64_t seq, uint64_t view, Digest digest,
                             const Command& cmd, Context& ctx) {
  auto& slot = window_.slot(seq);
  slot.committed = true;
  slot.view = view;
  slot.digest = digest;
  slot.cmd = cmd;  // copy first: cmd may alias into slot.pending
  slot.pending.clear();
  ctx.events.commit(id_, seq, view, digest, slot.cmd);
  apply_ready(ctx);
}

void ExecutorReplica::apply_ready(Context& ctx) {
  while (mode_ == Mode::Execution) {
    auto* slot = window_.find(executed_slots_);
    if (slot == nullptr || !slot->committed) break;
    const Command& cmd = slot->cmd;
    if (cmd.is_noop()) {
      ctx.events.execute(id_, executed_slots_, slot->digest, false, true);
    } else {
      auto key = std::make_pair(cmd.client, cmd.counter);
      auto existing = replies_.find(key);
      if (existing != replies_.end()) {
        // Re-proposed duplicate: do not re-apply, re-serve the reply.
        ctx.events.execute(id_, executed_slots_, slot->digest, true, false);
        ctx.out.send(ReplicaId{ClusterRole::Client, cmd.client},
                     MessageKind::Reply,
                     ReplyBody{{ReplyEntry{cmd.client, cmd.counter,
                                           existing->second}}});
      } else {
        std::string reply = app_.apply(cmd.payload);
        replies_[key] = reply;
        ++executed_commands_;
        ctx.events.execute(id_, executed_slots_, slot->digest, false, false);
        ctx.out.send(ReplicaId{ClusterRole::Client, cmd.client},
                     MessageKind::Reply,
                     ReplyBody{{ReplyEntry{cmd.client, cmd.counter,
                                           std::move(reply)}}});
      }
    }
    window_.erase(executed_slots_);
    ++executed_slots_;
    if (executed_slots_ % sys().params().checkpoint_interval == 0) {
      take_checkpoint(ctx);
    }
  }
}

void ExecutorReplica::take_checkpoint(Context& ctx) {
  std::string blob =
      serialize_checkpoint(executed_slots_, executed_commands_, replies_, app_);
  Digest digest = fnv1a(blob);
  checkpoints_[executed_slots_] = std::move(blob);
  ctx.events.checkpoint(id_, executed_slots_, digest);
  // Retain checkpoints covering the live window plus the newest one.
  while (checkpoints_.size() > 1 &&
         checkpoints_.begin()->first + sys().params().window_capacity <
             executed_slots_) {
    checkpoints_.erase(checkpoints_.begin());
  }
}

void ExecutorReplica::maybe_enter_sync(Context& ctx) {
  (void)ctx;
  if (stable_ > executed_slots_) {
    // The cluster moved past us and slots below the stable checkpoint may
    // be garbage-collected; fetch the checkpoint instead of waiting.
    mode_ = Mode::Sync;
  }
  if (stable_ > window_.low()) {
    window_.shift(stable_);
  }
}

void ExecutorReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::Confirm: {
      if (env.sender.cluster != ClusterRole::Committer) return;
      const auto* body = env.as<ConfirmBody>();
      if (body == nullptr) return;
      for (const auto& entry : body->entries) {
        handle_confirm_entry(entry, env.sender, ctx);
      }
      return;
    }
    case MessageKind::ReplyRequest: {
      if (env.sender.cluster != ClusterRole::Client) return;
      const auto* body = env.as<ReplyRequestBody>();
      if (body == nullptr) return;
      ReplyBody replies;
      for (uint64_t counter : body->counters) {
        auto it = replies_.find({env.sender.index, counter});
        if (it != replies_.end()) {
          replies.entries.push_back(
              ReplyEntry{env.sender.index, counter, it->second});
        }
      }
      if (!replies.entries.empty()) {
        ctx.out.send(env.sender, MessageKind::Reply, std::move(replies));
      }
      return;
    }
    case MessageKind::CheckpointRequest: {
      if (env.sender.cluster != ClusterRole::Executor) return;
      const auto* body = env.as<CheckpointRequestBody>();
      if (body == nullptr) return;
      auto it = checkpoints_.find(body->number);
      if (it != checkpoints_.end()) {
        ctx.out.send(env.sender, MessageKind::CheckpointResponse,
                     CheckpointResponseBody{body->number, it->second});
      }
      return;
    }
    case MessageKind::CheckpointResponse: {
      if (env.sender.cluster != ClusterRole::Executor) return;
      if (mode_ != Mode::Sync) return;
      const auto* body = env.as<CheckpointResponseBody>();
      if (body == nullptr || body->number <= executed_slots_) return;
      Digest digest = fnv1a(body->snapshot);
      sync_votes_[body->number][env.sender] = digest;
      sync_blobs_.try_emplace({body->number, digest}, body->snapshot);
      // Install once enough distinct executors served matching snapshots.
      std::map<Digest, uint32_t> counts;
      for (const auto& [peer, d] : sync_votes_[body->number]) ++counts[d];
      for (const auto& [d, count] : counts) {
        if (count < sys().thresholds().checkpoint) continue;
        const auto& blob = sync_blobs_.at({body->number, d});
        uint64_t slots = 0, commands = 0;
        std::map<std::pair<uint32_t, uint64_t>, std::string> replies;
        app::KvState app;
        if (!restore_checkpoint(blob, slots, commands, replies, app)) {
          ctx.events.alarm(id_, "corrupt checkpoint blob " + std::to_string(d));
          continue;
        }
        executed_slots_ = slots;
        executed_commands_ = commands;
        replies_ = std::move(replies);
        app_ = std::move(app);
        checkpoints_[body->number] = blob;
        mode_ = Mode::Execution;
        sync_votes_.clear();
        sync_blobs_.clear();
        ctx.events.checkpoint_install(id_, body->number, d);
        if (window_.low() < executed_slots_) window_.shift(executed_slots_);
        apply_ready(ctx);
        return;
      }
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr) return;
      if (body->loop == LoopKind::Completion) {
        completion_obs_.feed(env.sender, *body);
        uint64_t stable = sys().stable_checkpoint(completion_obs_.value());
        if (stable > stable_) {
          stable_ = stable;
          maybe_enter_sync(ctx);
        }
      } else if (body->loop == LoopKind::View) {
        view_obs_.feed(env.sender, *body);
      } else {
        agreement_obs_.feed(env.sender, *body);
      }
      return;
    }
    default:
      return;
  }
}

void ExecutorReplica::on_tick(Context& ctx) {
  ++ticks_;
  ctx.out.broadcast(ClusterRole::CompletionMonitor,
                    MessageKind::CompletionReport,
                    CompletionReportBody{executed_slots_, executed_commands_});
  if (mode_ == Mode::Sync) {
    ctx.out.broadcast(ClusterRole::Executor, MessageKind::CheckpointRequest,
                      CheckpointRequestBody{stable_}, id_.index);
  }
}

}  // namespace shellft::proto
