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

#ifndef SHELLFT_PROTO_REPLICA_HPP_
#define SHELLFT_PROTO_REPLICA_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "shellft/core/ids.hpp"
#include "shellft/core/messages.hpp"
#include "shellft/core/quorum.hpp"
#include "shellft/tailor/blueprint.hpp"

namespace shellft::proto {

using SimTime = uint64_t;  // simulated milliseconds

// Shared, immutable run configuration derived from the blueprint.
struct SystemView {
  const tailor::SystemBlueprint* bp = nullptr;
  std::shared_ptr<const Authenticator> auth;
  uint32_t client_count = 0;

  uint32_t f() const { return bp->f; }
  uint32_t size(ClusterRole role) const { return bp->size_of(role); }
  const tailor::Thresholds& thresholds() const { return bp->thresholds; }
  const tailor::ProtocolParams& params() const { return bp->params; }

  uint32_t leader_of(uint64_t view) const {
    return static_cast<uint32_t>(view % size(ClusterRole::Proposer));
  }
  // Staggered against the proposer rotation: every (leader, curator)
  // combination occurs within (f+1)^2 consecutive views, so one crashed
  // proposer plus one crashed curator can never block view changes
  // forever.
  uint32_t curator_of(uint64_t view) const {
    uint32_t n = size(ClusterRole::Curator);
    uint32_t p = size(ClusterRole::Proposer);
    return static_cast<uint32_t>((view + view / p) % n);
  }
  // Proposals flow to preparers when the agreement stage was installed.
  ClusterRole proposal_target() const {
    return bp->has_preparer ? ClusterRole::Preparer : ClusterRole::Committer;
  }
  uint64_t stable_checkpoint(uint64_t executed_slots) const {
    return executed_slots - executed_slots % params().checkpoint_interval;
  }
};

struct OutMessage {
  ReplicaId to;
  Envelope env;
};

// Collects a replica's emissions. The sender identity is stamped here and
// cannot be forged: adversarial wrappers may rewrite bodies, never senders.
class Outbox {
 public:
  Outbox(const SystemView& sys, ReplicaId self) : sys_(sys), self_(self) {}

  void send(const ReplicaId& to, MessageKind kind,
            std::shared_ptr<const Body> body) {
    Envelope env{self_, kind, std::move(body), sys_.auth->stamp(self_, kind)};
    msgs_.push_back(OutMessage{to, std::move(env)});
  }

  void send(const ReplicaId& to, MessageKind kind, Body body) {
    send(to, kind, std::make_shared<const Body>(std::move(body)));
  }

  // All-to-all dissemination to a cluster; the body is shared.
  void broadcast(ClusterRole to, MessageKind kind, Body body,
                 std::optional<uint32_t> skip_index = std::nullopt) {
    auto shared = std::make_shared<const Body>(std::move(body));
    for (uint32_t i = 0; i < sys_.size(to); ++i) {
      if (skip_index && *skip_index == i) continue;
      send(ReplicaId{to, i}, kind, shared);
    }
  }

  std::vector<OutMessage>& messages() { return msgs_; }
  const ReplicaId& self() const { return self_; }

 private:
  const SystemView& sys_;
  ReplicaId self_;
  std::vector<OutMessage> msgs_;
};

// Protocol-level events the harness records into the run trace.
class ProtoEvents {
 public:
  virtual ~ProtoEvents() = default;
  virtual void fe_accept(const ReplicaId& fe, const Command& cmd) = 0;
  virtual void client_submit(uint32_t client, uint64_t counter,
                             const Command& cmd) = 0;
  virtual void commit(const ReplicaId& executor, uint64_t seq, uint64_t view,
                      Digest digest, const Command& cmd) = 0;
  virtual void execute(const ReplicaId& executor, uint64_t seq, Digest digest,
                       bool duplicate, bool noop) = 0;
  virtual void reply_delivered(uint32_t client, uint64_t counter,
                               Digest reply_digest) = 0;
  virtual void view_announce(const ReplicaId& controller, uint64_t view) = 0;
  virtual void new_view(const ReplicaId& proposer, uint64_t view) = 0;
  virtual void checkpoint(const ReplicaId& executor, uint64_t number,
                          Digest digest) = 0;
  virtual void checkpoint_install(const ReplicaId& executor, uint64_t number,
                                  Digest digest) = 0;
  virtual void alarm(const ReplicaId& replica, const std::string& what) = 0;
};

struct Context {
  SimTime now = 0;
  Outbox& out;
  ProtoEvents& events;
};

// Deterministic event-driven replica: events (messages, ticks) are applied
// serially; no shared mutable state between replicas.
class Replica {
 public:
  Replica(ReplicaId id, const SystemView& sys) : id_(id), sys_(sys) {}
  virtual ~Replica() = default;

  const ReplicaId& id() const { return id_; }

  virtual void on_message(const Envelope& env, Context& ctx) = 0;
  virtual void on_tick(Context& ctx) = 0;

 protected:
  const SystemView& sys() const { return sys_; }

  ReplicaId id_;
  const SystemView& sys_;
};

// Relay-pattern sink embedded in a host replica: aggregates monitor values
// for one control loop and exposes the accepted (monotone) value pair.
class RelayObserver {
 public:
  RelayObserver(LoopKind loop, uint32_t threshold)
      : loop_(loop), threshold_(threshold) {}

  // Returns true when the accepted value advanced.
  bool feed(const ReplicaId& monitor, const MonitorValueBody& body) {
    if (body.loop != loop_) return false;
    a_.report(monitor, body.a);
    b_.report(monitor, body.b);
    bool advanced = false;
    if (auto v = a_.highest(threshold_); v && *v > accepted_a_) {
      accepted_a_ = *v;
      advanced = true;
    }
    if (auto v = b_.highest(threshold_); v && *v > accepted_b_) {
      accepted_b_ = *v;
      advanced = true;
    }
    return advanced;
  }

  uint64_t value() const { return accepted_a_; }
  uint64_t secondary() const { return accepted_b_; }
  LoopKind loop() const { return loop_; }

 private:
  LoopKind loop_;
  uint32_t threshold_;
  OpinionSet a_, b_;
  uint64_t accepted_a_ = 0;
  uint64_t accepted_b_ = 0;
};

}  // namespace shellft::proto

#endif  // SHELLFT_PROTO_REPLICA_HPP_
