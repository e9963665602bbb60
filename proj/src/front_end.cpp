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

void FrontEndReplica::ingest(const std::vector<Command>& commands,
                             bool from_client, Context& ctx) {
  std::vector<Command> fresh;
  std::vector<Command> reoffer;
  for (const auto& cmd : commands) {
    if (cmd.is_noop()) continue;
    auto key = std::make_pair(cmd.client, cmd.counter);
    auto [it, inserted] = store_.try_emplace(key, cmd);
    if (inserted) {
      order_.push_back(key);
      ctx.events.fe_accept(id_, cmd);
      fresh.push_back(cmd);
    } else if (from_client) {
      // A client retransmission: the command may have been lost on the
      // way to the proposers, offer it again.
      reoffer.push_back(it->second);
    }
  }
  if (!fresh.empty()) {
    ctx.out.broadcast(ClusterRole::FrontEnd, MessageKind::CommandGossip,
                      CommandGossipBody{fresh}, id_.index);
    ctx.out.broadcast(ClusterRole::Proposer, MessageKind::CommandOffer,
                      CommandOfferBody{std::move(fresh)});
  }
  if (!reoffer.empty()) {
    ctx.out.broadcast(ClusterRole::Proposer, MessageKind::CommandOffer,
                      CommandOfferBody{std::move(reoffer)});
  }
}

void FrontEndReplica::on_message(const Envelope& env, Context& ctx) {
  if (env.kind == MessageKind::ClientRequest &&
      env.sender.cluster == ClusterRole::Client) {
    if (const auto* body = env.as<ClientRequestBody>()) {
      ingest(body->commands, true, ctx);
    }
  } else if (env.kind == MessageKind::CommandGossip &&
             env.sender.cluster == ClusterRole::FrontEnd) {
    if (const auto* body = env.as<CommandGossipBody>()) {
      ingest(body->commands, false, ctx);
    }
  }
}

void FrontEndReplica::on_tick(Context& ctx) {
  ++ticks_;
  ctx.out.broadcast(ClusterRole::Controller, MessageKind::SubmissionProgress,
                    SubmissionProgressBody{accepted_count()});
  if (order_.empty()) return;
  // Round-robin re-offer so a command survives even when the client that
  // issued it failed; the proposers absorb duplicates.
  std::vector<Command> batch;
  size_t n = std::min(kOfferBatch, order_.size());
  for (size_t i = 0; i < n; ++i) {
    if (offer_cursor_ >= order_.size()) offer_cursor_ = 0;
    batch.push_back(store_.at(order_[offer_cursor_]));
    ++offer_cursor_;
  }
  ctx.out.broadcast(ClusterRole::Proposer, MessageKind::CommandOffer,
                    CommandOfferBody{std::move(batch)});
}

}  // namespace shellft::proto
