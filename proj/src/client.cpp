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

ClientReplica::ClientReplica(ReplicaId id, const SystemView& sys,
                             std::vector<std::pair<SimTime, std::string>> schedule)
    : Replica(id, sys),
      schedule_(std::move(schedule)),
      inflight_(sys.params().client_window, 1) {}

void ClientReplica::on_message(const Envelope& env, Context& ctx) {
  if (env.kind != MessageKind::Reply ||
      env.sender.cluster != ClusterRole::Executor) {
    return;
  }
  const auto* body = env.as<ReplyBody>();
  if (body == nullptr) return;
  for (const auto& entry : body->entries) {
    if (entry.client != id_.index) continue;
    auto* slot = inflight_.find(entry.counter);
    if (slot == nullptr || slot->delivered) continue;
    slot->votes[env.sender] = fnv1a(entry.bytes);
    auto quorum = quorum_match(slot->votes, sys().thresholds().reply);
    if (quorum.ambiguous) {
      ctx.events.alarm(id_, "ambiguous reply quorum for counter " +
                                std::to_string(entry.counter));
      continue;
    }
    if (quorum.value) {
      slot->delivered = true;
      ++delivered_;
      ctx.events.reply_delivered(id_.index, entry.counter, *quorum.value);
    }
  }
  // Advance the window past fully delivered commands.
  uint64_t low = inflight_.low();
  while (true) {
    const auto* slot = inflight_.find(low);
    if (slot == nullptr || !slot->delivered) break;
    ++low;
  }
  inflight_.shift(low);
}

void ClientReplica::on_tick(Context& ctx) {
  // Submit scheduled commands while the window has room.
  std::vector<Command> fresh;
  while (next_submit_ < schedule_.size() &&
         schedule_[next_submit_].first <= ctx.now) {
    uint64_t counter = next_submit_ + 1;
    if (!inflight_.in_range(counter)) break;  // window full, try later
    Command cmd{id_.index, counter, schedule_[next_submit_].second};
    inflight_.slot(counter) = PendingCmd{cmd, false, {}};
    ctx.events.client_submit(id_.index, counter, cmd);
    fresh.push_back(std::move(cmd));
    ++next_submit_;
  }
  if (!fresh.empty()) {
    ctx.out.broadcast(ClusterRole::FrontEnd, MessageKind::ClientRequest,
                      ClientRequestBody{std::move(fresh)});
  }
  if (ctx.now - last_retry_ < sys().params().client_retry_ms) return;
  last_retry_ = ctx.now;
  std::vector<Command> pending_cmds;
  std::vector<uint64_t> pending_counters;
  for (const auto& [counter, slot] : inflight_.slots()) {
    if (slot.delivered) continue;
    pending_cmds.push_back(slot.cmd);
    pending_counters.push_back(counter);
  }
  if (pending_cmds.empty()) return;
  ctx.out.broadcast(ClusterRole::FrontEnd, MessageKind::ClientRequest,
                    ClientRequestBody{std::move(pending_cmds)});
  ctx.out.broadcast(ClusterRole::Executor, MessageKind::ReplyRequest,
                    ReplyRequestBody{std::move(pending_counters)});
}

}  // namespace shellft::proto
