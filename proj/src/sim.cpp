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

#include "shellft/sim/sim.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

#include "shellft/core/rng.hpp"
#include "shellft/proto/machines.hpp"

namespace shellft::sim {

namespace {

using proto::Context;
using proto::OutMessage;
using proto::Outbox;
using proto::SystemView;

void perturb(std::string& bytes, Rng& rng) {
  if (bytes.empty()) {
    bytes = "\x01";
    return;
  }
  size_t pos = static_cast<size_t>(rng.uniform(0, bytes.size() - 1));
  bytes[pos] = static_cast<char>(bytes[pos] ^ 0x55);
}

// Adversarial wrappers around correct replicas: bodies may be rewritten
// arbitrarily, the authenticated sender identity cannot.
void apply_byzantine(FaultKind kind, Rng& rng, std::vector<OutMessage>& msgs) {
  for (auto& msg : msgs) {
    switch (kind) {
      case FaultKind::EquivocateProposals: {
        if (msg.to.index % 2 == 0) break;  // one half sees the original
        if (const auto* body = msg.env.as<ProposalBody>()) {
          ProposalBody forged = *body;
          for (auto& slot : forged.slots) {
            if (!slot.cmd.is_noop()) perturb(slot.cmd.payload, rng);
          }
          msg.env.body = std::make_shared<const Body>(std::move(forged));
        } else if (const auto* nv = msg.env.as<NewViewProposalBody>()) {
          NewViewProposalBody forged = *nv;
          for (auto& slot : forged.decision.repropose) {
            if (!slot.cmd.is_noop()) perturb(slot.cmd.payload, rng);
          }
          msg.env.body = std::make_shared<const Body>(std::move(forged));
        }
        break;
      }
      case FaultKind::ForgeReply: {
        if (const auto* body = msg.env.as<ReplyBody>()) {
          ReplyBody forged = *body;
          for (auto& entry : forged.entries) perturb(entry.bytes, rng);
          msg.env.body = std::make_shared<const Body>(std::move(forged));
        }
        break;
      }
      case FaultKind::ForgeCheckpoint: {
        if (const auto* body = msg.env.as<CheckpointResponseBody>()) {
          CheckpointResponseBody forged = *body;
          perturb(forged.snapshot, rng);
          msg.env.body = std::make_shared<const Body>(std::move(forged));
        }
        break;
      }
      case FaultKind::ForgeViewChangeReport: {
        if (const auto* body = msg.env.as<SlotHistoryBody>()) {
          SlotHistoryBody forged = *body;
          uint64_t fresh = 0;
          for (auto& entry : forged.entries) {
            perturb(entry.cmd.payload, rng);
            fresh = std::max(fresh, entry.seq + 1);
          }
          forged.entries.push_back(SlotEntry{
              forged.target_view == 0 ? 0 : forged.target_view - 1, fresh,
              Command{9999, rng.next(), "fabricated"}});
          msg.env.body = std::make_shared<const Body>(std::move(forged));
        } else if (const auto* report = msg.env.as<ConservatorReportBody>()) {
          ConservatorReportBody forged = *report;
          for (auto& entry : forged.certified) perturb(entry.cmd.payload, rng);
          for (auto& entry : forged.prepared) perturb(entry.cmd.payload, rng);
          msg.env.body = std::make_shared<const Body>(std::move(forged));
        }
        break;
      }
      case FaultKind::ArbitraryBytes: {
        Body forged = *msg.env.body;
        bool touched = false;
        auto fuzz = [&rng, &touched](std::string& bytes) {
          if (rng.chance(0.5)) {
            perturb(bytes, rng);
            touched = true;
          }
        };
        std::visit(
            [&](auto& body) {
              using T = std::decay_t<decltype(body)>;
              if constexpr (std::is_same_v<T, ClientRequestBody> ||
                            std::is_same_v<T, CommandGossipBody> ||
                            std::is_same_v<T, CommandOfferBody>) {
                for (auto& cmd : body.commands) fuzz(cmd.payload);
              } else if constexpr (std::is_same_v<T, ProposalBody>) {
                for (auto& slot : body.slots) fuzz(slot.cmd.payload);
              } else if constexpr (std::is_same_v<T, PrepareOpinionBody> ||
                                   std::is_same_v<T, ConfirmBody>) {
                for (auto& entry : body.entries) fuzz(entry.cmd.payload);
              } else if constexpr (std::is_same_v<T, SlotHistoryBody>) {
                for (auto& entry : body.entries) fuzz(entry.cmd.payload);
              } else if constexpr (std::is_same_v<T, ReplyBody>) {
                for (auto& entry : body.entries) fuzz(entry.bytes);
              } else if constexpr (std::is_same_v<T, CheckpointResponseBody>) {
                fuzz(body.snapshot);
              }
            },
            forged);
        if (touched) {
          msg.env.body = std::make_shared<const Body>(std::move(forged));
        }
        break;
      }
      case FaultKind::Crash:
        break;
    }
  }
}

struct Runtime {
  ReplicaId id;
  std::unique_ptr<proto::Replica> machine;
  std::string group;
  uint32_t machine_index = 0;
  bool crashed = false;
  // A replica may combine several adversarial behaviors (e.g. forged
  // replies and forged checkpoints); each applies from its own time.
  std::vector<std::pair<FaultKind, uint64_t>> byz_kinds;
  Rng byz_rng{0};
  std::string fault_label;
};

struct Event {
  uint64_t time = 0;
  uint64_t order = 0;
  enum Type : uint8_t { Fault, Tick, Delivery } type = Tick;
  size_t target = 0;  // replica index (Delivery) or fault index (Fault)
  Envelope env;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.order > b.order;
  }
};

class TraceCollector final : public proto::ProtoEvents {
 public:
  explicit TraceCollector(std::vector<TraceRecord>& records)
      : records_(records) {}

  void set_now(uint64_t now) { now_ = now; }

  void fe_accept(const ReplicaId& fe, const Command& cmd) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::FeAccept;
    rec.who = fe;
    rec.client = cmd.client;
    rec.counter = cmd.counter;
    records_.push_back(std::move(rec));
  }

  void client_submit(uint32_t client, uint64_t counter,
                     const Command& cmd) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::Submit;
    rec.client = client;
    rec.counter = counter;
    rec.digest = digest_of(cmd);
    records_.push_back(std::move(rec));
  }

  void commit(const ReplicaId& executor, uint64_t seq, uint64_t view,
              Digest digest, const Command& cmd) override {
    if (defined_.insert(digest).second) {
      TraceRecord def;
      def.time = now_;
      def.kind = TraceKind::CommandDef;
      def.digest = digest;
      def.client = cmd.client;
      def.counter = cmd.counter;
      def.text = cmd.payload;
      records_.push_back(std::move(def));
    }
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::Commit;
    rec.who = executor;
    rec.seq = seq;
    rec.view = view;
    rec.digest = digest;
    records_.push_back(std::move(rec));
  }

  void execute(const ReplicaId& executor, uint64_t seq, Digest digest,
               bool duplicate, bool noop) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::Execute;
    rec.who = executor;
    rec.seq = seq;
    rec.digest = digest;
    rec.dup = duplicate;
    rec.noop = noop;
    records_.push_back(std::move(rec));
  }

  void reply_delivered(uint32_t client, uint64_t counter,
                       Digest reply_digest) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::ReplyDeliver;
    rec.client = client;
    rec.counter = counter;
    rec.digest = reply_digest;
    records_.push_back(std::move(rec));
  }

  void view_announce(const ReplicaId& controller, uint64_t view) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::ViewAnnounce;
    rec.who = controller;
    rec.view = view;
    records_.push_back(std::move(rec));
  }

  void new_view(const ReplicaId& proposer, uint64_t view) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::NewView;
    rec.who = proposer;
    rec.view = view;
    records_.push_back(std::move(rec));
  }

  void checkpoint(const ReplicaId& executor, uint64_t number,
                  Digest digest) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::Checkpoint;
    rec.who = executor;
    rec.seq = number;
    rec.digest = digest;
    records_.push_back(std::move(rec));
  }

  void checkpoint_install(const ReplicaId& executor, uint64_t number,
                          Digest digest) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::CheckpointInstall;
    rec.who = executor;
    rec.seq = number;
    rec.digest = digest;
    records_.push_back(std::move(rec));
  }

  void alarm(const ReplicaId& replica, const std::string& what) override {
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::Alarm;
    rec.who = replica;
    rec.text = what;
    for (auto& c : rec.text) {
      if (c == ' ') c = '_';
    }
    records_.push_back(std::move(rec));
  }

 private:
  std::vector<TraceRecord>& records_;
  std::set<Digest> defined_;
  uint64_t now_ = 0;
};

class Simulation {
 public:
  explicit Simulation(const RunConfig& config)
      : config_(config), net_rng_(Rng(config.seed).fork(0xae77)), collector_(records_) {
    auth_ = std::make_shared<ModeledAuthenticator>();
    sys_.bp = &config_.blueprint;
    sys_.auth = auth_;
    sys_.client_count = config_.workload.clients;
    build_replicas();
    schedule_faults();
    // one global tick per boundary
    for (uint64_t t = config_.blueprint.params.tick_ms; t <= config_.horizon_ms;
         t += config_.blueprint.params.tick_ms) {
      push(Event{t, next_order_++, Event::Tick, 0, {}});
    }
  }

  RunResult run() {
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      if (ev.time > config_.horizon_ms) break;
      now_ = ev.time;
      collector_.set_now(now_);
      switch (ev.type) {
        case Event::Fault:
          apply_fault(config_.faults.entries[ev.target]);
          break;
        case Event::Tick:
          for (size_t i = 0; i < replicas_.size(); ++i) dispatch_tick(i);
          break;
        case Event::Delivery:
          dispatch_delivery(ev);
          break;
      }
    }
    return finish();
  }

 private:
  void build_replicas() {
    for (const auto& cluster : config_.blueprint.clusters) {
      for (uint32_t i = 0; i < cluster.size; ++i) {
        ReplicaId id{cluster.role, i};
        Runtime rt;
        rt.id = id;
        rt.machine = proto::make_replica(id, sys_);
        auto machine = config_.blueprint.machine_of(id);
        rt.group = machine ? machine->first : "unplaced";
        rt.machine_index = machine ? machine->second : 0;
        index_[id] = replicas_.size();
        replicas_.push_back(std::move(rt));
      }
    }
    auto schedules = app::workload_generate(config_.workload, config_.seed);
    for (uint32_t c = 0; c < config_.workload.clients; ++c) {
      ReplicaId id{ClusterRole::Client, c + 1};
      Runtime rt;
      rt.id = id;
      std::vector<std::pair<proto::SimTime, std::string>> schedule;
      for (const auto& cmd : schedules[c]) {
        schedule.emplace_back(cmd.at_ms, cmd.payload);
      }
      rt.machine =
          std::make_unique<proto::ClientReplica>(id, sys_, std::move(schedule));
      rt.group = "client";
      rt.machine_index = c + 1;
      index_[id] = replicas_.size();
      replicas_.push_back(std::move(rt));
    }
  }

  void schedule_faults() {
    for (size_t i = 0; i < config_.faults.entries.size(); ++i) {
      push(Event{config_.faults.entries[i].at_ms, next_order_++, Event::Fault,
                 i, {}});
    }
  }

  void apply_fault(const FaultEntry& entry) {
    auto mark_crashed = [this](const ReplicaId& id) {
      auto it = index_.find(id);
      if (it == index_.end()) return;
      auto& rt = replicas_[it->second];
      if (rt.crashed) return;
      rt.crashed = true;
      rt.fault_label = "crash@" + std::to_string(now_);
      TraceRecord rec;
      rec.time = now_;
      rec.kind = TraceKind::Fault;
      rec.who = id;
      rec.text = "crash";
      records_.push_back(std::move(rec));
    };
    if (entry.kind == FaultKind::Crash) {
      if (entry.machine_target) {
        // Crashing a machine crashes every co-located replica.
        for (const auto& m : config_.blueprint.machines) {
          if (m.group == entry.group && m.index == entry.machine_index) {
            for (const auto& host : m.hosts) mark_crashed(host);
          }
        }
      } else {
        mark_crashed(entry.replica);
      }
      return;
    }
    auto it = index_.find(entry.replica);
    if (it == index_.end()) return;
    auto& rt = replicas_[it->second];
    if (rt.byz_kinds.empty()) {
      rt.byz_rng = Rng(config_.seed).fork(0xb42 + it->second);
    }
    rt.byz_kinds.emplace_back(entry.kind, entry.at_ms);
    if (!rt.fault_label.empty()) rt.fault_label += "+";
    rt.fault_label +=
        std::string(fault_kind_name(entry.kind)) + "@" + std::to_string(now_);
    TraceRecord rec;
    rec.time = now_;
    rec.kind = TraceKind::Fault;
    rec.who = entry.replica;
    rec.text = std::string(fault_kind_name(entry.kind));
    records_.push_back(std::move(rec));
  }

  void dispatch_tick(size_t idx) {
    auto& rt = replicas_[idx];
    if (rt.crashed) return;
    Outbox out(sys_, rt.id);
    Context ctx{now_, out, collector_};
    rt.machine->on_tick(ctx);
    flush(rt, out);
  }

  void dispatch_delivery(Event& ev) {
    auto& rt = replicas_[ev.target];
    if (rt.crashed) return;
    if (!auth_->verify(ev.env)) return;
    if (config_.record_deliveries) {
      TraceRecord rec;
      rec.time = now_;
      rec.kind = TraceKind::Deliver;
      rec.who = ev.env.sender;
      rec.text = rt.id.str() + ":" +
                 std::string(message_kind_name(ev.env.kind));
      rec.seq = ev.order;
      records_.push_back(std::move(rec));
    }
    Outbox out(sys_, rt.id);
    Context ctx{now_, out, collector_};
    rt.machine->on_message(ev.env, ctx);
    flush(rt, out);
  }

  void flush(Runtime& rt, Outbox& out) {
    auto& msgs = out.messages();
    if (msgs.empty()) return;
    for (const auto& [kind, from] : rt.byz_kinds) {
      if (now_ >= from) apply_byzantine(kind, rt.byz_rng, msgs);
    }
    for (auto& msg : msgs) send(rt, msg);
  }

  bool partitioned(const Runtime& a, const Runtime& b) const {
    if (a.group == "client" || b.group == "client") return false;
    for (const auto& part : config_.network.partitions) {
      if (now_ < part.from_ms || now_ >= part.to_ms) continue;
      auto side = [&part](const Runtime& rt) {
        for (const auto& [group, index] : part.side_a) {
          if (rt.group == group && rt.machine_index == index) return true;
        }
        return false;
      };
      if (side(a) != side(b)) return true;
    }
    return false;
  }

  void send(Runtime& from, OutMessage& msg) {
    auto it = index_.find(msg.to);
    if (it == index_.end()) return;
    auto& dst = replicas_[it->second];
    if (now_ < config_.network.gst_ms &&
        net_rng_.chance(config_.network.drop_probability)) {
      return;
    }
    if (partitioned(from, dst)) return;
    uint64_t delay = net_rng_.uniform(config_.network.min_delay_ms,
                                      config_.network.max_delay_ms);
    uint64_t at = now_ + std::max<uint64_t>(delay, 1);
    if (at > config_.horizon_ms) return;
    push(Event{at, next_order_++, Event::Delivery, it->second,
               std::move(msg.env)});
  }

  void push(Event ev) { queue_.push(std::move(ev)); }

  RunResult finish() {
    RunResult result;
    auto& trace = result.trace;
    trace.preset = config_.blueprint.preset;
    trace.f = config_.blueprint.f;
    trace.seed = config_.seed;
    trace.horizon_ms = config_.horizon_ms;
    trace.within_model =
        fault_script_within_model(config_.faults, config_.blueprint);
    for (const auto& rt : replicas_) {
      ReplicaStatus status;
      status.id = rt.id;
      status.machine_group = rt.group;
      status.machine_index = rt.machine_index;
      status.correct = !rt.crashed && rt.byz_kinds.empty();
      status.fault = rt.fault_label;
      trace.replicas.push_back(std::move(status));
    }
    trace.records = std::move(records_);
    result.metrics = compute_metrics(trace);
    return result;
  }

  RunConfig config_;
  Rng net_rng_;
  std::vector<TraceRecord> records_;
  TraceCollector collector_;
  std::shared_ptr<ModeledAuthenticator> auth_;
  SystemView sys_;
  std::vector<Runtime> replicas_;
  std::map<ReplicaId, size_t> index_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  uint64_t next_order_ = 0;
  uint64_t now_ = 0;
};

}  // namespace

RunResult run_simulation(const RunConfig& config) {
  Simulation sim(config);
  return sim.run();
}

std::string Metrics::to_text() const {
  std::ostringstream out;
  out << "bucket_ms " << bucket_ms << "\n";
  out << "# bucket_start committed mean_latency_ms\n";
  for (size_t i = 0; i < committed_per_bucket.size(); ++i) {
    out << i * bucket_ms << " " << committed_per_bucket[i] << " "
        << (i < mean_latency_per_bucket.size() ? mean_latency_per_bucket[i]
                                               : 0.0)
        << "\n";
  }
  out << "committed " << committed << "\n";
  out << "delivered " << delivered << "\n";
  out << "mean_latency_ms " << mean_latency_ms << "\n";
  out << "p50_latency_ms " << p50_latency_ms << "\n";
  out << "p95_latency_ms " << p95_latency_ms << "\n";
  out << "view_changes " << max_view << "\n";
  out << "longest_commit_gap_ms " << longest_commit_gap_ms << " at "
      << gap_start_ms << "\n";
  return out.str();
}

Metrics compute_metrics(const TraceFile& trace, uint64_t bucket_ms) {
  Metrics metrics;
  metrics.bucket_ms = bucket_ms;
  size_t buckets = trace.horizon_ms / bucket_ms + 1;
  metrics.committed_per_bucket.assign(buckets, 0);
  metrics.mean_latency_per_bucket.assign(buckets, 0.0);
  std::vector<uint64_t> bucket_delivered(buckets, 0);
  std::map<uint64_t, uint64_t> first_commit;  // seq -> time
  std::map<std::pair<uint32_t, uint64_t>, uint64_t> submit_at;
  std::vector<uint64_t> latencies;
  for (const auto& rec : trace.records) {
    switch (rec.kind) {
      case TraceKind::Commit:
        first_commit.try_emplace(rec.seq, rec.time);
        break;
      case TraceKind::Submit:
        submit_at.try_emplace({rec.client, rec.counter}, rec.time);
        break;
      case TraceKind::ReplyDeliver: {
        ++metrics.delivered;
        auto it = submit_at.find({rec.client, rec.counter});
        if (it != submit_at.end()) {
          uint64_t latency = rec.time - it->second;
          latencies.push_back(latency);
          size_t bucket = rec.time / bucket_ms;
          if (bucket < buckets) {
            ++bucket_delivered[bucket];
            metrics.mean_latency_per_bucket[bucket] +=
                static_cast<double>(latency);
          }
        }
        break;
      }
      case TraceKind::NewView:
        metrics.max_view = std::max(metrics.max_view, rec.view);
        break;
      default:
        break;
    }
  }
  metrics.committed = first_commit.size();
  std::vector<uint64_t> commit_times;
  commit_times.reserve(first_commit.size());
  for (const auto& [seq, time] : first_commit) commit_times.push_back(time);
  std::sort(commit_times.begin(), commit_times.end());
  for (uint64_t t : commit_times) {
    size_t bucket = t / bucket_ms;
    if (bucket < metrics.committed_per_bucket.size()) {
      ++metrics.committed_per_bucket[bucket];
    }
  }
  // Longest outage between consecutive commits; silence after the final
  // commit (workload ran out) does not count.
  uint64_t prev = 0;
  for (uint64_t t : commit_times) {
    if (t - prev > metrics.longest_commit_gap_ms) {
      metrics.longest_commit_gap_ms = t - prev;
      metrics.gap_start_ms = prev;
    }
    prev = t;
  }
  for (size_t i = 0; i < buckets; ++i) {
    if (bucket_delivered[i] > 0) {
      metrics.mean_latency_per_bucket[i] /= double(bucket_delivered[i]);
    }
  }
  if (!latencies.empty()) {
    uint64_t sum = 0;
    for (uint64_t l : latencies) sum += l;
    metrics.mean_latency_ms = static_cast<double>(sum) / latencies.size();
    std::sort(latencies.begin(), latencies.end());
    metrics.p50_latency_ms = latencies[latencies.size() / 2];
    metrics.p95_latency_ms = latencies[latencies.size() * 95 / 100];
  }
  return metrics;
}

}  // namespace shellft::sim
