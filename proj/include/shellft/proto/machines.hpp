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

#ifndef SHELLFT_PROTO_MACHINES_HPP_
#define SHELLFT_PROTO_MACHINES_HPP_

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shellft/app/kv.hpp"
#include "shellft/core/window.hpp"
#include "shellft/proto/replica.hpp"

namespace shellft::proto {

// Retransmission behavior: state changes are re-broadcast immediately
// (dirty slots); a periodic full resync heals drops and stragglers.
inline constexpr uint64_t kResyncTicks = 50;
inline constexpr uint64_t kPostVcFlushTicks = 5;
inline constexpr uint64_t kEvidenceTicks = 200;
inline constexpr size_t kOfferBatch = 32;

// Receives client commands, deduplicates them, gossips fresh commands to
// its peers and offers them to the proposers. Reports the count of
// distinct accepted commands to the controllers.
class FrontEndReplica : public Replica {
 public:
  FrontEndReplica(ReplicaId id, const SystemView& sys) : Replica(id, sys) {}

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  uint64_t accepted_count() const { return order_.size(); }

 private:
  void ingest(const std::vector<Command>& commands, bool from_client,
              Context& ctx);

  std::map<std::pair<uint32_t, uint64_t>, Command> store_;
  std::vector<std::pair<uint32_t, uint64_t>> order_;
  size_t offer_cursor_ = 0;
  uint64_t ticks_ = 0;
};

// Paxos-style leader: assigns consecutive sequence numbers to pending
// commands in Normal mode; in ViewChange mode the new leader re-proposes
// every value that may have been committed (committer histories in the
// base/adapted configurations, the curator pipeline's decision otherwise).
class ProposerReplica : public Replica {
 public:
  enum class Mode { Normal, ViewChange };

  struct ProposalSlot {
    uint64_t view = 0;
    Command cmd;
  };

  ProposerReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  Mode mode() const { return mode_; }
  uint64_t view() const { return view_; }
  uint64_t next_seq() const { return next_seq_; }
  bool is_leader() const { return sys().leader_of(view_) == id_.index; }
  const Window<ProposalSlot>& window() const { return window_; }
  size_t pending_count() const { return pending_.size(); }

 private:
  void adopt_view(uint64_t view, Context& ctx);
  void try_complete_history_vc(Context& ctx);
  void install_repropose(const std::vector<SlotCommand>& slots, Context& ctx);
  void assign_pending(Context& ctx);
  void flush(Context& ctx, bool full);

  Mode mode_ = Mode::Normal;
  uint64_t view_ = 0;
  uint64_t next_seq_ = 0;
  Window<ProposalSlot> window_;
  std::deque<Command> pending_;
  std::set<std::pair<uint32_t, uint64_t>> seen_;
  std::set<std::pair<uint32_t, uint64_t>> in_window_;
  RelayObserver agreement_obs_, completion_obs_, view_obs_;
  std::map<ReplicaId, SlotHistoryBody> vc_reports_;
  std::map<Digest, std::set<ReplicaId>> decision_votes_;
  std::map<Digest, NewViewDecision> decision_bodies_;
  std::set<uint64_t> dirty_;
  uint64_t ticks_ = 0;
  uint64_t full_flush_until_ = 0;
};

// Verifies and relays proposals: the witness cluster of the reliable-
// distribution pattern between a shell proposer and the committers.
class PreparerReplica : public Replica {
 public:
  struct PrepSlot {
    uint64_t view = 0;
    Digest digest = 0;
    Command cmd;
  };

  PreparerReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  uint64_t view() const { return view_; }
  const Window<PrepSlot>& window() const { return window_; }

 private:
  void try_install_decision(uint64_t view, Context& ctx);

  uint64_t view_ = 0;
  Window<PrepSlot> window_;
  RelayObserver completion_obs_, view_obs_;
  bool vc_pending_ = false;
  uint64_t vc_ticks_ = 0;
  std::map<Digest, std::set<ReplicaId>> decision_votes_;
  std::map<Digest, NewViewDecision> decision_bodies_;
  std::set<uint64_t> decided_views_;
  std::set<uint64_t> dirty_;
  uint64_t ticks_ = 0;
};

// Confirms sequence-number assignments. Accepts proposals directly from
// the leader, or (with a shell proposer) only once 2f+1 matching preparer
// opinions arrive; first write wins within a view, higher views supersede.
class CommitterReplica : public Replica {
 public:
  struct CommitSlot {
    bool has = false;
    uint64_t view = 0;
    Digest digest = 0;
    Command cmd;
    // preparer opinions per view (agreement-stage configurations)
    std::map<uint64_t, std::map<ReplicaId, std::pair<Digest, Command>>> opinions;
  };

  CommitterReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  uint64_t view() const { return view_; }
  const Window<CommitSlot>& window() const { return window_; }

 private:
  void accept_entry(uint64_t seq, uint64_t view, const Command& cmd,
                    Context& ctx);

  uint64_t view_ = 0;
  Window<CommitSlot> window_;
  RelayObserver agreement_obs_, completion_obs_, view_obs_;
  bool vc_pending_ = false;
  uint64_t vc_ticks_ = 0;
  uint64_t active_high_ = 0;  // highest accepted seq + 1
  std::set<uint64_t> dirty_;
  uint64_t ticks_ = 0;
};

// Commits once enough committers confirmed, executes committed commands in
// sequence order, answers clients, snapshots at checkpoint boundaries and
// fetches peer checkpoints when the window moves past unexecuted slots.
class ExecutorReplica : public Replica {
 public:
  enum class Mode { Execution, Sync };

  struct PerView {
    std::set<ReplicaId> confirmers;
    bool has_candidate = false;
    Digest candidate_digest = 0;
    Command candidate_cmd;
    // digest-matching mode (shell committers)
    std::map<Digest, std::pair<Command, std::set<ReplicaId>>> by_digest;
  };

  struct ExecSlot {
    bool committed = false;
    uint64_t view = 0;
    Digest digest = 0;
    Command cmd;
    std::map<uint64_t, PerView> pending;
  };

  ExecutorReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  Mode mode() const { return mode_; }
  uint64_t executed_slots() const { return executed_slots_; }
  uint64_t executed_commands() const { return executed_commands_; }
  const app::KvState& app_state() const { return app_; }
  const std::map<std::pair<uint32_t, uint64_t>, std::string>& replies() const {
    return replies_;
  }
  std::string checkpoint_blob(uint64_t number) const;

 private:
  void handle_confirm_entry(const SlotEntry& entry, const ReplicaId& from,
                            Context& ctx);
  void commit(uint64_t seq, uint64_t view, Digest digest, const Command& cmd,
              Context& ctx);
  void apply_ready(Context& ctx);
  void take_checkpoint(Context& ctx);
  void maybe_enter_sync(Context& ctx);

  Mode mode_ = Mode::Execution;
  Window<ExecSlot> window_;
  uint64_t executed_slots_ = 0;
  uint64_t executed_commands_ = 0;
  app::KvState app_;
  std::map<std::pair<uint32_t, uint64_t>, std::string> replies_;
  std::map<uint64_t, std::string> checkpoints_;
  RelayObserver agreement_obs_, completion_obs_, view_obs_;
  uint64_t stable_ = 0;
  // sync state: responses per checkpoint number, digest-matched
  std::map<uint64_t, std::map<ReplicaId, Digest>> sync_votes_;
  std::map<std::pair<uint64_t, Digest>, std::string> sync_blobs_;
  uint64_t ticks_ = 0;
};

// Monitors progress and, without it, announces the next view with an
// exponentially growing timeout.
class ControllerReplica : public Replica {
 public:
  ControllerReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  uint64_t announced_view() const { return announced_view_; }
  uint64_t timeout() const { return timeout_; }
  uint64_t deadline() const { return deadline_; }

 private:
  void announce(uint64_t view, Context& ctx);

  uint64_t announced_view_ = 0;
  uint64_t timeout_ = 0;
  uint64_t deadline_ = 0;
  OpinionSet submissions_;
  uint64_t finalized_ = 0;
  RelayObserver completion_obs_, view_obs_;
  std::map<uint64_t, std::set<ReplicaId>> rejects_;
};

// Relay cluster of one control loop: accepts a value on t_s matching
// source inputs or forwarded peer values, then spreads it to peers and
// observer hosts.
class MonitorReplica : public Replica {
 public:
  MonitorReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  uint64_t accepted() const { return accepted_a_; }
  uint64_t accepted_secondary() const { return accepted_b_; }

 private:
  LoopKind loop_;
  ClusterRole source_cluster_;
  uint32_t ts_ = 1;
  uint32_t peer_threshold_ = 1;
  OpinionSet sources_a_, sources_b_;
  OpinionSet peers_a_, peers_b_;
  uint64_t accepted_a_ = 0;
  uint64_t accepted_b_ = 0;
};

// Gathers the preparers' and committers' per-slot evidence for a pending
// view change and reports it to the curator cluster and the auditors.
class ConservatorReplica : public Replica {
 public:
  ConservatorReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

 private:
  void try_assemble(Context& ctx);

  uint64_t view_ = 0;
  bool active_ = false;
  uint64_t vc_ticks_ = 0;
  bool assembled_ = false;
  ConservatorReportBody report_;
  std::map<ReplicaId, SlotHistoryBody> prepared_;
  std::map<ReplicaId, SlotHistoryBody> committed_;
  RelayObserver view_obs_;
};

// Evidence merged from conservator reports: per slot the highest-view
// claim with enough backing.
struct MergedEvidence {
  std::map<uint64_t, SlotEntry> certified;
  std::map<uint64_t, SlotEntry> prepared;
};

MergedEvidence merge_reports(
    const std::map<ReplicaId, ConservatorReportBody>& reports,
    uint32_t cert_support);

// Decides the unique re-propose set for a new view and runs it through
// the auditors and record keepers (the Byzantine counterpart of the main
// path's three steps).
class CuratorReplica : public Replica {
 public:
  CuratorReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

 private:
  uint64_t view_ = 0;
  std::map<ReplicaId, ConservatorReportBody> reports_;
  bool proposed_ = false;
  NewViewProposalBody proposal_;
  uint64_t vc_ticks_ = 0;
  RelayObserver view_obs_;
};

// Verifies the curator's decision against its own conservator evidence:
// dropping or replacing a certified value is rejected.
class AuditorReplica : public Replica {
 public:
  AuditorReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

 private:
  void try_verify(Context& ctx);

  uint64_t view_ = 0;
  std::map<ReplicaId, ConservatorReportBody> reports_;
  std::optional<NewViewDecision> candidate_;
  bool decided_ = false;
  bool vouched_ = false;
  NewViewDecision decision_;
  bool rejected_ = false;
  uint64_t vc_ticks_ = 0;
  RelayObserver view_obs_;
};

// Stores the decision once 2f+1 auditors vouch for it and serves it to
// the proposers and preparers of the new view.
class RecordKeeperReplica : public Replica {
 public:
  RecordKeeperReplica(ReplicaId id, const SystemView& sys);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

 private:
  uint64_t view_ = 0;
  std::map<uint64_t, std::map<Digest, std::set<ReplicaId>>> votes_;
  std::map<uint64_t, NewViewDecision> stored_;
  uint64_t serve_ticks_ = 0;
  RelayObserver view_obs_;
};

// Drives a scheduled command stream: submits to every front end, fetches
// results from the executors and delivers a reply once enough distinct
// executors agree on it.
class ClientReplica : public Replica {
 public:
  ClientReplica(ReplicaId id, const SystemView& sys,
                std::vector<std::pair<SimTime, std::string>> schedule);

  void on_message(const Envelope& env, Context& ctx) override;
  void on_tick(Context& ctx) override;

  uint64_t delivered_count() const { return delivered_; }
  uint64_t submitted_count() const { return next_submit_; }

 private:
  struct PendingCmd {
    Command cmd;
    bool delivered = false;
    std::map<ReplicaId, Digest> votes;
  };

  std::vector<std::pair<SimTime, std::string>> schedule_;
  size_t next_submit_ = 0;
  Window<PendingCmd> inflight_;  // keyed by counter
  uint64_t delivered_ = 0;
  SimTime last_retry_ = 0;
};

// Builds the replica for one cluster member per the blueprint's wiring.
std::unique_ptr<Replica> make_replica(const ReplicaId& id,
                                      const SystemView& sys);

}  // namespace shellft::proto

#endif  // SHELLFT_PROTO_MACHINES_HPP_
