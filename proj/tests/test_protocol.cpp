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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shellft/proto/machines.hpp"
#include "shellft/tailor/tailor.hpp"

using namespace shellft;
using namespace shellft::proto;

namespace {

struct Collected final : ProtoEvents {
  std::vector<std::pair<ReplicaId, Command>> accepts;
  std::vector<std::tuple<ReplicaId, uint64_t, uint64_t, Digest>> commits;
  std::vector<std::tuple<ReplicaId, uint64_t, bool, bool>> executes;
  std::vector<std::tuple<uint32_t, uint64_t, Digest>> delivered;
  std::vector<std::pair<ReplicaId, uint64_t>> announces;
  std::vector<std::pair<ReplicaId, uint64_t>> new_views;
  std::vector<std::pair<ReplicaId, uint64_t>> checkpoints;
  std::vector<std::pair<ReplicaId, uint64_t>> installs;
  std::vector<std::string> alarms;

  void fe_accept(const ReplicaId& fe, const Command& cmd) override {
    accepts.emplace_back(fe, cmd);
  }
  void client_submit(uint32_t, uint64_t, const Command&) override {}
  void commit(const ReplicaId& ex, uint64_t seq, uint64_t view, Digest d,
              const Command&) override {
    commits.emplace_back(ex, seq, view, d);
  }
  void execute(const ReplicaId& ex, uint64_t seq, Digest, bool dup,
               bool noop) override {
    executes.emplace_back(ex, seq, dup, noop);
  }
  void reply_delivered(uint32_t client, uint64_t counter, Digest d) override {
    delivered.emplace_back(client, counter, d);
  }
  void view_announce(const ReplicaId& c, uint64_t view) override {
    announces.emplace_back(c, view);
  }
  void new_view(const ReplicaId& p, uint64_t view) override {
    new_views.emplace_back(p, view);
  }
  void checkpoint(const ReplicaId& ex, uint64_t n, Digest) override {
    checkpoints.emplace_back(ex, n);
  }
  void checkpoint_install(const ReplicaId& ex, uint64_t n, Digest) override {
    installs.emplace_back(ex, n);
  }
  void alarm(const ReplicaId&, const std::string& what) override {
    alarms.push_back(what);
  }
};

struct Rig {
  tailor::SystemBlueprint bp;
  std::shared_ptr<ModeledAuthenticator> auth;
  SystemView sys;
  Collected events;

  explicit Rig(const std::string& preset, uint32_t f = 1) {
    auto selection = tailor::parse_shell_selection(preset, nullptr);
    REQUIRE(selection.has_value());
    auto configured = tailor::configure(*selection, f);
    REQUIRE(configured.has_value());
    bp = *configured;
    auth = std::make_shared<ModeledAuthenticator>();
    sys.bp = &bp;
    sys.auth = auth;
    sys.client_count = 2;
  }

  Envelope envelope(const ReplicaId& sender, MessageKind kind, Body body) {
    return Envelope{sender, kind, std::make_shared<const Body>(std::move(body)),
                    auth->stamp(sender, kind)};
  }

  std::vector<OutMessage> deliver(Replica& replica, const ReplicaId& sender,
                                  MessageKind kind, Body body,
                                  SimTime now = 0) {
    Outbox out(sys, replica.id());
    Context ctx{now, out, events};
    replica.on_message(envelope(sender, kind, std::move(body)), ctx);
    return std::move(out.messages());
  }

  std::vector<OutMessage> tick(Replica& replica, SimTime now) {
    Outbox out(sys, replica.id());
    Context ctx{now, out, events};
    replica.on_tick(ctx);
    return std::move(out.messages());
  }

  // Feed a quorum of monitor values so the host's observer accepts.
  void feed_monitor(Replica& replica, LoopKind loop, uint64_t a,
                    uint64_t b = 0) {
    ClusterRole monitor = loop == LoopKind::View ? ClusterRole::ViewMonitor
                          : loop == LoopKind::Completion
                              ? ClusterRole::CompletionMonitor
                              : ClusterRole::AgreementMonitor;
    uint32_t threshold = loop == LoopKind::View ? bp.thresholds.obs_view
                         : loop == LoopKind::Completion
                             ? bp.thresholds.obs_completion
                             : bp.thresholds.obs_agreement;
    for (uint32_t i = 0; i < threshold; ++i) {
      deliver(replica, ReplicaId{monitor, i}, MessageKind::MonitorValue,
              MonitorValueBody{loop, a, b});
    }
  }
};

Command cmd(uint32_t client, uint64_t counter, std::string payload) {
  return Command{client, counter, std::move(payload)};
}

size_t count_kind(const std::vector<OutMessage>& msgs, MessageKind kind) {
  size_t n = 0;
  for (const auto& m : msgs) n += m.env.kind == kind ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("front end: fresh commands are gossiped and offered") {
  Rig rig("base");
  FrontEndReplica fe(ReplicaId{ClusterRole::FrontEnd, 0}, rig.sys);
  auto out = rig.deliver(fe, ReplicaId{ClusterRole::Client, 1},
                         MessageKind::ClientRequest,
                         ClientRequestBody{{cmd(1, 1, "a")}});
  // gossip to the 2f other front ends, offer to every proposer
  CHECK(count_kind(out, MessageKind::CommandGossip) == 2);
  CHECK(count_kind(out, MessageKind::CommandOffer) ==
        rig.bp.size_of(ClusterRole::Proposer));
  CHECK(rig.events.accepts.size() == 1);
  CHECK(fe.accepted_count() == 1);

  // duplicate delivery from gossip: absorbed silently
  auto again = rig.deliver(fe, ReplicaId{ClusterRole::FrontEnd, 1},
                           MessageKind::CommandGossip,
                           CommandGossipBody{{cmd(1, 1, "a")}});
  CHECK(again.empty());
  CHECK(fe.accepted_count() == 1);

  // duplicate from the client: re-offered to proposers, not re-gossiped
  auto retry = rig.deliver(fe, ReplicaId{ClusterRole::Client, 1},
                           MessageKind::ClientRequest,
                           ClientRequestBody{{cmd(1, 1, "a")}});
  CHECK(count_kind(retry, MessageKind::CommandGossip) == 0);
  CHECK(count_kind(retry, MessageKind::CommandOffer) ==
        rig.bp.size_of(ClusterRole::Proposer));
}

TEST_CASE("front end: gossip-learned commands survive their source") {
  Rig rig("base");
  FrontEndReplica fe(ReplicaId{ClusterRole::FrontEnd, 2}, rig.sys);
  rig.deliver(fe, ReplicaId{ClusterRole::FrontEnd, 0},
              MessageKind::CommandGossip, CommandGossipBody{{cmd(7, 3, "x")}});
  // the periodic re-offer keeps the command alive without its client or
  // the originating front end
  auto out = rig.tick(fe, 10);
  bool offered = false;
  for (const auto& m : out) {
    if (m.env.kind != MessageKind::CommandOffer) continue;
    const auto* body = m.env.as<CommandOfferBody>();
    for (const auto& c : body->commands) {
      offered = offered || (c.client == 7 && c.counter == 3);
    }
  }
  CHECK(offered);
  CHECK(count_kind(out, MessageKind::SubmissionProgress) ==
        rig.bp.size_of(ClusterRole::Controller));
}

TEST_CASE("proposer: leader assigns consecutive slots, others stay silent") {
  Rig rig("base");
  ProposerReplica leader(ReplicaId{ClusterRole::Proposer, 0}, rig.sys);
  ProposerReplica follower(ReplicaId{ClusterRole::Proposer, 1}, rig.sys);
  CommandOfferBody offer{{cmd(1, 1, "a"), cmd(1, 2, "b"), cmd(2, 1, "c")}};
  rig.deliver(leader, ReplicaId{ClusterRole::FrontEnd, 0},
              MessageKind::CommandOffer, offer);
  rig.deliver(follower, ReplicaId{ClusterRole::FrontEnd, 0},
              MessageKind::CommandOffer, offer);
  auto out = rig.tick(leader, 10);
  REQUIRE(count_kind(out, MessageKind::Proposal) ==
          rig.bp.size_of(ClusterRole::Committer));
  const auto* body = out.front().env.as<ProposalBody>();
  REQUIRE(body != nullptr);
  REQUIRE(body->slots.size() == 3);
  CHECK(body->slots[0].seq == 0);
  CHECK(body->slots[1].seq == 1);
  CHECK(body->slots[2].seq == 2);
  CHECK(body->view == 0);
  CHECK(leader.next_seq() == 3);

  auto silent = rig.tick(follower, 10);
  CHECK(count_kind(silent, MessageKind::Proposal) == 0);
}

TEST_CASE("proposer: window back-pressure stops assignment") {
  Rig rig("base");
  ProposerReplica leader(ReplicaId{ClusterRole::Proposer, 0}, rig.sys);
  std::vector<Command> batch;
  uint64_t capacity = rig.bp.params.window_capacity;
  for (uint64_t i = 0; i < capacity + 10; ++i) {
    batch.push_back(cmd(1, i + 1, "p"));
  }
  rig.deliver(leader, ReplicaId{ClusterRole::FrontEnd, 0},
              MessageKind::CommandOffer, CommandOfferBody{std::move(batch)});
  rig.tick(leader, 10);
  CHECK(leader.next_seq() == capacity);  // window full
  CHECK(leader.pending_count() == 10);   // the rest waits
}

TEST_CASE("committer: first write wins, stale views dropped") {
  Rig rig("base");
  CommitterReplica committer(ReplicaId{ClusterRole::Committer, 0}, rig.sys);
  ReplicaId leader{ClusterRole::Proposer, 0};
  rig.deliver(committer, leader, MessageKind::Proposal,
              ProposalBody{0, {{5, cmd(1, 1, "x")}}});
  auto out = rig.tick(committer, 10);
  REQUIRE(count_kind(out, MessageKind::Confirm) ==
          rig.bp.size_of(ClusterRole::Executor));
  const auto* confirms = out.front().env.as<ConfirmBody>();
  REQUIRE(confirms->entries.size() == 1);
  CHECK(confirms->entries[0].seq == 5);
  CHECK(confirms->entries[0].view == 0);
  CHECK(confirms->entries[0].cmd.payload == "x");

  // conflicting second proposal for the same (view, seq): ignored
  rig.deliver(committer, leader, MessageKind::Proposal,
              ProposalBody{0, {{5, cmd(1, 9, "y")}}});
  CHECK(committer.window().find(5)->cmd.payload == "x");

  // non-leader sender for the view: ignored
  rig.deliver(committer, ReplicaId{ClusterRole::Proposer, 1},
              MessageKind::Proposal, ProposalBody{0, {{6, cmd(1, 2, "z")}}});
  CHECK_FALSE(committer.window().contains(6));

  // stale view after adopting view 1
  rig.feed_monitor(committer, LoopKind::View, 1);
  CHECK(committer.view() == 1);
  rig.deliver(committer, leader, MessageKind::Proposal,
              ProposalBody{0, {{7, cmd(1, 3, "w")}}});
  CHECK_FALSE(committer.window().contains(7));
}

TEST_CASE("executor: commits on f+1 confirmations, applies in order") {
  Rig rig("base");
  ExecutorReplica executor(ReplicaId{ClusterRole::Executor, 0}, rig.sys);
  Command c0 = cmd(1, 1, "");
  Command c1 = cmd(1, 2, "");
  // seq 1 confirmed twice: committed but held, nothing executed yet
  rig.deliver(executor, ReplicaId{ClusterRole::Committer, 0},
              MessageKind::Confirm, ConfirmBody{{{0, 1, c1}}});
  rig.deliver(executor, ReplicaId{ClusterRole::Committer, 1},
              MessageKind::Confirm, ConfirmBody{{{0, 1, c1}}});
  CHECK(rig.events.commits.size() == 1);
  CHECK(rig.events.executes.empty());

  // one confirmation for seq 0 is below the threshold
  rig.deliver(executor, ReplicaId{ClusterRole::Committer, 0},
              MessageKind::Confirm, ConfirmBody{{{0, 0, c0}}});
  CHECK(rig.events.commits.size() == 1);

  // the second confirmation commits seq 0 and unblocks both executions
  rig.deliver(executor, ReplicaId{ClusterRole::Committer, 2},
              MessageKind::Confirm, ConfirmBody{{{0, 0, c0}}});
  CHECK(rig.events.commits.size() == 2);
  REQUIRE(rig.events.executes.size() == 2);
  CHECK(std::get<1>(rig.events.executes[0]) == 0);
  CHECK(std::get<1>(rig.events.executes[1]) == 1);
  CHECK(executor.executed_slots() == 2);
}

TEST_CASE("executor: duplicate command re-serves the stored reply") {
  Rig rig("base");
  ExecutorReplica executor(ReplicaId{ClusterRole::Executor, 0}, rig.sys);
  Command c = cmd(1, 1, "payload");
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(executor, ReplicaId{ClusterRole::Committer, i},
                MessageKind::Confirm, ConfirmBody{{{0, 0, c}}});
  }
  REQUIRE(executor.executed_slots() == 1);
  // the same command re-proposed at seq 1
  std::vector<OutMessage> replies;
  for (uint32_t i = 0; i < 2; ++i) {
    auto out = rig.deliver(executor, ReplicaId{ClusterRole::Committer, i},
                           MessageKind::Confirm, ConfirmBody{{{0, 1, c}}});
    for (auto& m : out) replies.push_back(std::move(m));
  }
  REQUIRE(executor.executed_slots() == 2);
  CHECK(std::get<2>(rig.events.executes[1]) == true);  // dup flag
  CHECK(executor.executed_commands() == 1);
  CHECK(count_kind(replies, MessageKind::Reply) == 1);
}

TEST_CASE("executor: checkpoints at interval boundaries") {
  Rig rig("base");
  ExecutorReplica executor(ReplicaId{ClusterRole::Executor, 0}, rig.sys);
  uint64_t interval = rig.bp.params.checkpoint_interval;
  for (uint64_t seq = 0; seq < interval; ++seq) {
    Command c = cmd(1, seq + 1, "v");
    for (uint32_t i = 0; i < 2; ++i) {
      rig.deliver(executor, ReplicaId{ClusterRole::Committer, i},
                  MessageKind::Confirm, ConfirmBody{{{0, seq, c}}});
    }
  }
  REQUIRE(rig.events.checkpoints.size() == 1);
  CHECK(rig.events.checkpoints[0].second == interval);
  CHECK_FALSE(executor.checkpoint_blob(interval).empty());
}

TEST_CASE("executor sync: base trusts one peer, shell needs f+1 matching") {
  Rig base("base");
  ExecutorReplica lagging(ReplicaId{ClusterRole::Executor, 0}, base.sys);
  // build a peer holding a checkpoint
  ExecutorReplica peer(ReplicaId{ClusterRole::Executor, 1}, base.sys);
  uint64_t interval = base.bp.params.checkpoint_interval;
  for (uint64_t seq = 0; seq < interval; ++seq) {
    Command c = cmd(1, seq + 1, "v");
    for (uint32_t i = 0; i < 2; ++i) {
      base.deliver(peer, ReplicaId{ClusterRole::Committer, i},
                   MessageKind::Confirm, ConfirmBody{{{0, seq, c}}});
    }
  }
  std::string blob = peer.checkpoint_blob(interval);
  REQUIRE_FALSE(blob.empty());

  // the cluster reports progress past the lagging executor
  base.feed_monitor(lagging, LoopKind::Completion, interval, interval);
  CHECK(lagging.mode() == ExecutorReplica::Mode::Sync);
  auto requests = base.tick(lagging, 10);
  CHECK(count_kind(requests, MessageKind::CheckpointRequest) ==
        base.bp.size_of(ClusterRole::Executor) - 1);
  // a single peer response installs it (crash-model trust)
  base.deliver(lagging, ReplicaId{ClusterRole::Executor, 1},
               MessageKind::CheckpointResponse,
               CheckpointResponseBody{interval, blob});
  CHECK(lagging.mode() == ExecutorReplica::Mode::Execution);
  CHECK(lagging.executed_slots() == interval);
  CHECK(base.events.installs.size() == 1);
  CHECK(lagging.app_state() == peer.app_state());

  // shell executors require f+1 matching snapshots
  Rig minas("minas");
  ExecutorReplica hardened(ReplicaId{ClusterRole::Executor, 0}, minas.sys);
  minas.feed_monitor(hardened, LoopKind::Completion, interval, interval);
  CHECK(hardened.mode() == ExecutorReplica::Mode::Sync);
  std::string forged = blob;
  forged[0] = static_cast<char>(forged[0] ^ 0x55);
  minas.deliver(hardened, ReplicaId{ClusterRole::Executor, 1},
                MessageKind::CheckpointResponse,
                CheckpointResponseBody{interval, forged});
  minas.deliver(hardened, ReplicaId{ClusterRole::Executor, 2},
                MessageKind::CheckpointResponse,
                CheckpointResponseBody{interval, blob});
  CHECK(hardened.mode() == ExecutorReplica::Mode::Sync);  // still below f+1
  minas.deliver(hardened, ReplicaId{ClusterRole::Executor, 3},
                MessageKind::CheckpointResponse,
                CheckpointResponseBody{interval, blob});
  CHECK(hardened.mode() == ExecutorReplica::Mode::Execution);
  CHECK(hardened.executed_slots() == interval);
}

TEST_CASE("controller: progress resets, stalls announce with back-off") {
  Rig rig("base");
  ControllerReplica controller(ReplicaId{ClusterRole::Controller, 0}, rig.sys);
  // target: front ends accepted 1 command
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(controller, ReplicaId{ClusterRole::FrontEnd, i},
                MessageKind::SubmissionProgress, SubmissionProgressBody{1});
  }
  // progress before the deadline: no view change
  rig.feed_monitor(controller, LoopKind::Completion, 1, 1);
  rig.tick(controller, 1000);
  CHECK(controller.announced_view() == 0);
  CHECK(controller.timeout() == 1000);

  // new command, no progress: the deadline fires and the timeout doubles
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(controller, ReplicaId{ClusterRole::FrontEnd, i},
                MessageKind::SubmissionProgress, SubmissionProgressBody{2});
  }
  rig.tick(controller, 2100);
  CHECK(controller.announced_view() == 1);
  CHECK(controller.timeout() == 2000);
  CHECK(rig.events.announces.size() == 1);

  // a second stall: view 2, timeout 4s
  rig.tick(controller, 4200);
  CHECK(controller.announced_view() == 2);
  CHECK(controller.timeout() == 4000);
}

TEST_CASE("monitor: t_s matching sources or a peer forward") {
  Rig rig("base");
  MonitorReplica monitor(ReplicaId{ClusterRole::CompletionMonitor, 0}, rig.sys);
  // one executor reporting 16 is below t_s = f+1
  rig.deliver(monitor, ReplicaId{ClusterRole::Executor, 0},
              MessageKind::CompletionReport, CompletionReportBody{16, 12});
  CHECK(monitor.accepted() == 0);
  // the second source reaches the threshold: both executors are at >= 16
  rig.deliver(monitor, ReplicaId{ClusterRole::Executor, 1},
              MessageKind::CompletionReport, CompletionReportBody{17, 13});
  CHECK(monitor.accepted() == 16);
  CHECK(monitor.accepted_secondary() == 12);

  // a fresh monitor accepts a forwarded value from one peer
  MonitorReplica peer(ReplicaId{ClusterRole::CompletionMonitor, 1}, rig.sys);
  rig.deliver(peer, ReplicaId{ClusterRole::CompletionMonitor, 0},
              MessageKind::MonitorForward,
              MonitorForwardBody{LoopKind::Completion, 16, 12});
  CHECK(peer.accepted() == 16);

  // the monitor relays to peers and observers on tick
  auto out = rig.tick(monitor, 10);
  CHECK(count_kind(out, MessageKind::MonitorForward) ==
        rig.bp.size_of(ClusterRole::CompletionMonitor) - 1);
  CHECK(count_kind(out, MessageKind::MonitorValue) > 0);
}

TEST_CASE("observer: below f+1 monitor inputs nothing is exposed") {
  Rig rig("base");
  RelayObserver observer(LoopKind::Completion,
                         rig.bp.thresholds.obs_completion);
  observer.feed(ReplicaId{ClusterRole::CompletionMonitor, 0},
                MonitorValueBody{LoopKind::Completion, 10, 10});
  CHECK(observer.value() == 0);
  observer.feed(ReplicaId{ClusterRole::CompletionMonitor, 1},
                MonitorValueBody{LoopKind::Completion, 12, 12});
  CHECK(observer.value() == 10);
}

TEST_CASE("client: base delivers on one reply, shell needs f+1 matching") {
  Rig base("base");
  ClientReplica client(ReplicaId{ClusterRole::Client, 1}, base.sys,
                       {{0, "G\x1f" "user1"}});
  auto submit = base.tick(client, 10);
  CHECK(count_kind(submit, MessageKind::ClientRequest) > 0);
  base.deliver(client, ReplicaId{ClusterRole::Executor, 0}, MessageKind::Reply,
               ReplyBody{{ReplyEntry{1, 1, "NOTFOUND"}}});
  CHECK(base.events.delivered.size() == 1);

  Rig minas("minas");
  ClientReplica hardened(ReplicaId{ClusterRole::Client, 1}, minas.sys,
                         {{0, "G\x1f" "user1"}});
  minas.tick(hardened, 10);
  // one forged reply plus two matching correct ones: the forgery loses
  minas.deliver(hardened, ReplicaId{ClusterRole::Executor, 0},
                MessageKind::Reply, ReplyBody{{ReplyEntry{1, 1, "FORGED"}}});
  CHECK(minas.events.delivered.empty());
  minas.deliver(hardened, ReplicaId{ClusterRole::Executor, 1},
                MessageKind::Reply, ReplyBody{{ReplyEntry{1, 1, "NOTFOUND"}}});
  minas.deliver(hardened, ReplicaId{ClusterRole::Executor, 2},
                MessageKind::Reply, ReplyBody{{ReplyEntry{1, 1, "NOTFOUND"}}});
  REQUIRE(minas.events.delivered.size() == 1);
  CHECK(std::get<2>(minas.events.delivered[0]) == fnv1a("NOTFOUND"));
}

TEST_CASE("client: unanswered commands are retransmitted") {
  Rig rig("base");
  ClientReplica client(ReplicaId{ClusterRole::Client, 1}, rig.sys,
                       {{0, "G\x1f" "user1"}});
  rig.tick(client, 10);
  auto quiet = rig.tick(client, 50);  // below the retry period
  CHECK(count_kind(quiet, MessageKind::ClientRequest) == 0);
  auto retry = rig.tick(client, 120);
  CHECK(count_kind(retry, MessageKind::ClientRequest) ==
        rig.bp.size_of(ClusterRole::FrontEnd));
  CHECK(count_kind(retry, MessageKind::ReplyRequest) ==
        rig.bp.size_of(ClusterRole::Executor));
}

TEST_CASE("base view change: any reported value is re-proposed") {
  Rig rig("base");
  ProposerReplica proposer(ReplicaId{ClusterRole::Proposer, 1}, rig.sys);
  rig.feed_monitor(proposer, LoopKind::View, 1);
  CHECK(proposer.view() == 1);
  CHECK(proposer.mode() == ProposerReplica::Mode::ViewChange);
  CHECK(proposer.is_leader());
  // one committer saw x at slot 5, the other has an empty window
  rig.deliver(proposer, ReplicaId{ClusterRole::Committer, 0},
              MessageKind::ViewChangeReport,
              SlotHistoryBody{1, {{0, 5, cmd(1, 1, "x")}}});
  CHECK(proposer.mode() == ProposerReplica::Mode::ViewChange);
  rig.deliver(proposer, ReplicaId{ClusterRole::Committer, 1},
              MessageKind::ViewChangeReport, SlotHistoryBody{1, {}});
  CHECK(proposer.mode() == ProposerReplica::Mode::Normal);
  REQUIRE(rig.events.new_views.size() == 1);
  CHECK(rig.events.new_views[0].second == 1);
  // slot 5 re-proposed with x, slots 0..4 filled with no-ops
  const auto& window = proposer.window();
  REQUIRE(window.contains(5));
  CHECK(window.find(5)->cmd.payload == "x");
  CHECK(window.find(5)->view == 1);
  for (uint64_t seq = 0; seq < 5; ++seq) {
    REQUIRE(window.contains(seq));
    CHECK(window.find(seq)->cmd.is_noop());
  }
  CHECK(proposer.next_seq() == 6);
}

TEST_CASE("base view change: all empty means no-ops and Normal mode") {
  Rig rig("base");
  ProposerReplica proposer(ReplicaId{ClusterRole::Proposer, 1}, rig.sys);
  rig.feed_monitor(proposer, LoopKind::View, 1);
  rig.deliver(proposer, ReplicaId{ClusterRole::Committer, 0},
              MessageKind::ViewChangeReport, SlotHistoryBody{1, {}});
  rig.deliver(proposer, ReplicaId{ClusterRole::Committer, 2},
              MessageKind::ViewChangeReport, SlotHistoryBody{1, {}});
  CHECK(proposer.mode() == ProposerReplica::Mode::Normal);
  CHECK(proposer.window().empty());
}

TEST_CASE("view adoption is monotone: lower views are ignored") {
  Rig rig("base");
  ProposerReplica proposer(ReplicaId{ClusterRole::Proposer, 0}, rig.sys);
  rig.feed_monitor(proposer, LoopKind::View, 2);
  CHECK(proposer.view() == 2);
  // stale view values cannot drag the replica backwards
  rig.feed_monitor(proposer, LoopKind::View, 1);
  CHECK(proposer.view() == 2);
}

TEST_CASE("preparer: equivocation never reaches the committers' quorum") {
  Rig rig("sentry");
  CommitterReplica committer(ReplicaId{ClusterRole::Committer, 0}, rig.sys);
  ReplicaId leader{ClusterRole::Proposer, 0};
  // Four preparers, split 2/2 between conflicting proposals: the
  // committer sees two opinions per value, below the 2f+1 threshold.
  for (uint32_t i = 0; i < 4; ++i) {
    PreparerReplica preparer(ReplicaId{ClusterRole::Preparer, i}, rig.sys);
    std::string payload = i % 2 == 0 ? "x" : "y";
    rig.deliver(preparer, leader, MessageKind::Proposal,
                ProposalBody{0, {{0, cmd(1, 1, payload)}}});
    auto out = rig.tick(preparer, 10);
    for (const auto& m : out) {
      if (m.env.kind == MessageKind::PrepareOpinion && m.to == committer.id()) {
        const auto* body = m.env.as<PrepareOpinionBody>();
        REQUIRE(body != nullptr);
        rig.deliver(committer, m.env.sender, MessageKind::PrepareOpinion,
                    *body);
      }
    }
  }
  auto* slot = committer.window().find(0);
  CHECK((slot == nullptr || !slot->has));
}

TEST_CASE("preparer: a clean proposal certifies at the committer") {
  Rig rig("sentry");
  CommitterReplica committer(ReplicaId{ClusterRole::Committer, 0}, rig.sys);
  for (uint32_t i = 0; i < 3; ++i) {  // 2f+1 matching opinions
    rig.deliver(committer, ReplicaId{ClusterRole::Preparer, i},
                MessageKind::PrepareOpinion,
                PrepareOpinionBody{{{0, 0, cmd(1, 1, "x")}}});
  }
  REQUIRE(committer.window().contains(0));
  CHECK(committer.window().find(0)->has);
  CHECK(committer.window().find(0)->cmd.payload == "x");
  auto out = rig.tick(committer, 10);
  CHECK(count_kind(out, MessageKind::Confirm) ==
        rig.bp.size_of(ClusterRole::Executor));
}

TEST_CASE("preparer: stale views and non-leaders are rejected") {
  Rig rig("sentry");
  PreparerReplica preparer(ReplicaId{ClusterRole::Preparer, 0}, rig.sys);
  rig.feed_monitor(preparer, LoopKind::View, 1);
  // stale view 0 proposal dropped
  rig.deliver(preparer, ReplicaId{ClusterRole::Proposer, 0},
              MessageKind::Proposal, ProposalBody{0, {{0, cmd(1, 1, "x")}}});
  CHECK_FALSE(preparer.window().contains(0));
  // wrong leader for view 1 dropped
  rig.deliver(preparer, ReplicaId{ClusterRole::Proposer, 0},
              MessageKind::Proposal, ProposalBody{1, {{0, cmd(1, 1, "x")}}});
  CHECK_FALSE(preparer.window().contains(0));
  // the view-1 leader is accepted
  rig.deliver(preparer, ReplicaId{ClusterRole::Proposer, 1},
              MessageKind::Proposal, ProposalBody{1, {{0, cmd(1, 1, "x")}}});
  CHECK(preparer.window().contains(0));
}

TEST_CASE("adapted proposer: quorum-backed values win, fabrications lose") {
  Rig rig("committer");  // shell committers, adapted proposer
  REQUIRE(rig.bp.vc_mode == tailor::ViewChangeMode::AdaptedProposer);
  ProposerReplica proposer(ReplicaId{ClusterRole::Proposer, 1}, rig.sys);
  rig.feed_monitor(proposer, LoopKind::View, 1);
  REQUIRE(proposer.mode() == ProposerReplica::Mode::ViewChange);
  // two correct committers report x certified at slot 0; the Byzantine
  // third report fabricates y at slot 1 and completes the 2f+1 quorum
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(proposer, ReplicaId{ClusterRole::Committer, i},
                MessageKind::ViewChangeReport,
                SlotHistoryBody{1, {{0, 0, cmd(1, 1, "x")}}});
  }
  CHECK(proposer.mode() == ProposerReplica::Mode::ViewChange);  // 2f+1 needed
  rig.deliver(proposer, ReplicaId{ClusterRole::Committer, 3},
              MessageKind::ViewChangeReport,
              SlotHistoryBody{1, {{0, 1, cmd(9, 9, "fabricated")}}});
  REQUIRE(proposer.mode() == ProposerReplica::Mode::Normal);
  REQUIRE(proposer.window().contains(0));
  CHECK(proposer.window().find(0)->cmd.payload == "x");
  // the fabricated claim lacks f+1 matching support: no-op instead
  REQUIRE(proposer.window().contains(1));
  CHECK(proposer.window().find(1)->cmd.is_noop());
}

TEST_CASE("curator pipeline: decision flows to the new leader") {
  Rig rig("sentry");
  // Conservator assembles evidence from 2f+1 preparers and f+1 committers.
  ConservatorReplica conservator(ReplicaId{ClusterRole::Conservator, 0},
                                 rig.sys);
  rig.feed_monitor(conservator, LoopKind::View, 1);
  for (uint32_t i = 0; i < 3; ++i) {
    rig.deliver(conservator, ReplicaId{ClusterRole::Preparer, i},
                MessageKind::PreparedEvidence,
                SlotHistoryBody{1, {{0, 0, cmd(1, 1, "x")}}});
  }
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(conservator, ReplicaId{ClusterRole::Committer, i},
                MessageKind::CommittedEvidence,
                SlotHistoryBody{1, {{0, 0, cmd(1, 1, "x")}}});
  }
  auto out = rig.tick(conservator, 10);
  REQUIRE(count_kind(out, MessageKind::ConservatorReport) ==
          rig.bp.size_of(ClusterRole::Curator) +
              rig.bp.size_of(ClusterRole::Auditor));
  const auto* report = out.front().env.as<ConservatorReportBody>();
  REQUIRE(report != nullptr);
  REQUIRE(report->certified.size() == 1);
  CHECK(report->certified[0].cmd.payload == "x");

  // Curator 1 leads view 1 and proposes the decision to the auditors.
  CuratorReplica curator(ReplicaId{ClusterRole::Curator, 1}, rig.sys);
  rig.feed_monitor(curator, LoopKind::View, 1);
  for (uint32_t i = 0; i < 2; ++i) {  // f+1 conservator reports
    rig.deliver(curator, ReplicaId{ClusterRole::Conservator, i},
                MessageKind::ConservatorReport, *report);
  }
  auto proposals = rig.tick(curator, 20);
  REQUIRE(count_kind(proposals, MessageKind::NewViewProposal) ==
          rig.bp.size_of(ClusterRole::Auditor));
  const auto* nv = proposals.front().env.as<NewViewProposalBody>();
  REQUIRE(nv != nullptr);
  REQUIRE(nv->decision.repropose.size() == 1);
  CHECK(nv->decision.repropose[0].cmd.payload == "x");

  // Auditors verify against their own evidence and vouch.
  AuditorReplica auditor(ReplicaId{ClusterRole::Auditor, 0}, rig.sys);
  rig.feed_monitor(auditor, LoopKind::View, 1);
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(auditor, ReplicaId{ClusterRole::Conservator, i},
                MessageKind::ConservatorReport, *report);
  }
  rig.deliver(auditor, ReplicaId{ClusterRole::Curator, 1},
              MessageKind::NewViewProposal, *nv);
  auto vouchers = rig.tick(auditor, 30);
  REQUIRE(count_kind(vouchers, MessageKind::DecisionVoucher) ==
          rig.bp.size_of(ClusterRole::RecordKeeper));

  // Record keeper stores on 2f+1 vouchers and serves the decision.
  RecordKeeperReplica keeper(ReplicaId{ClusterRole::RecordKeeper, 0}, rig.sys);
  rig.feed_monitor(keeper, LoopKind::View, 1);
  for (uint32_t i = 0; i < 3; ++i) {
    rig.deliver(keeper, ReplicaId{ClusterRole::Auditor, i},
                MessageKind::DecisionVoucher,
                DecisionVoucherBody{nv->decision});
  }
  auto served = rig.tick(keeper, 40);
  CHECK(count_kind(served, MessageKind::DecisionResponse) ==
        rig.bp.size_of(ClusterRole::Proposer) +
            rig.bp.size_of(ClusterRole::Preparer));

  // The new leader resumes Normal mode on f+1 matching responses.
  ProposerReplica leader(ReplicaId{ClusterRole::Proposer, 1}, rig.sys);
  rig.feed_monitor(leader, LoopKind::View, 1);
  REQUIRE(leader.mode() == ProposerReplica::Mode::ViewChange);
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(leader, ReplicaId{ClusterRole::RecordKeeper, i},
                MessageKind::DecisionResponse,
                DecisionResponseBody{nv->decision});
  }
  CHECK(leader.mode() == ProposerReplica::Mode::Normal);
  REQUIRE(leader.window().contains(0));
  CHECK(leader.window().find(0)->cmd.payload == "x");
  CHECK(rig.events.new_views.size() == 1);
}

TEST_CASE("auditor: dropping a certified value is rejected") {
  Rig rig("sentry");
  AuditorReplica auditor(ReplicaId{ClusterRole::Auditor, 0}, rig.sys);
  rig.feed_monitor(auditor, LoopKind::View, 1);
  ConservatorReportBody report;
  report.target_view = 1;
  report.certified.push_back({0, 0, cmd(1, 1, "x")});
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(auditor, ReplicaId{ClusterRole::Conservator, i},
                MessageKind::ConservatorReport, report);
  }
  // the curator's decision replaces x with y
  NewViewDecision bad;
  bad.view = 1;
  bad.repropose.push_back({0, cmd(2, 2, "y")});
  rig.deliver(auditor, ReplicaId{ClusterRole::Curator, 1},
              MessageKind::NewViewProposal, NewViewProposalBody{bad});
  auto out = rig.tick(auditor, 10);
  CHECK(count_kind(out, MessageKind::DecisionVoucher) == 0);
  CHECK(count_kind(out, MessageKind::ViewChangeReject) ==
        rig.bp.size_of(ClusterRole::Controller));
}

TEST_CASE("auditor: extra no-ops for genuinely empty slots are accepted") {
  Rig rig("sentry");
  AuditorReplica auditor(ReplicaId{ClusterRole::Auditor, 0}, rig.sys);
  rig.feed_monitor(auditor, LoopKind::View, 1);
  ConservatorReportBody report;
  report.target_view = 1;
  for (uint32_t i = 0; i < 2; ++i) {
    rig.deliver(auditor, ReplicaId{ClusterRole::Conservator, i},
                MessageKind::ConservatorReport, report);
  }
  NewViewDecision decision;
  decision.view = 1;
  decision.repropose.push_back({0, Command::noop(0)});
  rig.deliver(auditor, ReplicaId{ClusterRole::Curator, 1},
              MessageKind::NewViewProposal, NewViewProposalBody{decision});
  auto out = rig.tick(auditor, 10);
  CHECK(count_kind(out, MessageKind::DecisionVoucher) ==
        rig.bp.size_of(ClusterRole::RecordKeeper));
}

TEST_CASE("outbox stamps the true sender; wrappers cannot forge identities") {
  Rig rig("base");
  Outbox out(rig.sys, ReplicaId{ClusterRole::Proposer, 0});
  out.broadcast(ClusterRole::Committer, MessageKind::Proposal,
                ProposalBody{0, {}});
  REQUIRE_FALSE(out.messages().empty());
  for (const auto& m : out.messages()) {
    CHECK(m.env.sender == ReplicaId{ClusterRole::Proposer, 0});
    CHECK(rig.auth->verify(m.env));
    // a tampered sender fails verification
    Envelope forged = m.env;
    forged.sender = ReplicaId{ClusterRole::Proposer, 1};
    CHECK_FALSE(rig.auth->verify(forged));
  }
}
