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

ControllerReplica::ControllerReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys),
      timeout_(sys.params().timeout_base_ms),
      deadline_(sys.params().timeout_base_ms),
      completion_obs_(LoopKind::Completion, sys.thresholds().obs_completion),
      view_obs_(LoopKind::View, sys.thresholds().obs_view) {}

void ControllerReplica::announce(uint64_t view, Context& ctx) {
  if (view <= announced_view_) return;
  announced_view_ = view;
  ctx.events.view_announce(id_, view);
  deadline_ = ctx.now + timeout_;
}

void ControllerReplica::on_message(const Envelope& env, Context& ctx) {
  switch (env.kind) {
    case MessageKind::SubmissionProgress: {
      if (env.sender.cluster != ClusterRole::FrontEnd) return;
      if (const auto* body = env.as<SubmissionProgressBody>()) {
        submissions_.report(env.sender, body->accepted);
      }
      return;
    }
    case MessageKind::MonitorValue: {
      const auto* body = env.as<MonitorValueBody>();
      if (body == nullptr) return;
      if (body->loop == LoopKind::Completion) {
        uint64_t before = completion_obs_.secondary();
        completion_obs_.feed(env.sender, *body);
        if (completion_obs_.secondary() > before) {
          // Progress: re-arm with the base timeout.
          finalized_ = completion_obs_.secondary();
          timeout_ = sys().params().timeout_base_ms;
          deadline_ = ctx.now + timeout_;
        }
      } else if (body->loop == LoopKind::View) {
        view_obs_.feed(env.sender, *body);
        if (view_obs_.value() > announced_view_) {
          // Converge on the cluster-wide view.
          announced_view_ = view_obs_.value();
          deadline_ = ctx.now + timeout_;
        }
      }
      return;
    }
    case MessageKind::ViewChangeReject: {
      if (env.sender.cluster != ClusterRole::Auditor) return;
      const auto* body = env.as<ViewChangeRejectBody>();
      if (body == nullptr || body->view < announced_view_) return;
      auto& voters = rejects_[body->view];
      voters.insert(env.sender);
      if (voters.size() >= sys().thresholds().reject) {
        // Advisory fast path: rotate the curator without waiting for the
        // timeout to expire.
        timeout_ *= 2;
        announce(body->view + 1, ctx);
      }
      return;
    }
    default:
      return;
  }
}

void ControllerReplica::on_tick(Context& ctx) {
  if (ctx.now >= deadline_) {
    auto target = submissions_.highest(sys().thresholds().submission);
    bool pending = target.has_value() && *target > finalized_;
    if (pending) {
      timeout_ *= 2;
      announce(announced_view_ + 1, ctx);
    } else {
      timeout_ = sys().params().timeout_base_ms;
    }
    deadline_ = ctx.now + timeout_;
  }
  ctx.out.broadcast(ClusterRole::ViewMonitor, MessageKind::ViewAnnounce,
                    ViewAnnounceBody{announced_view_});
}

MonitorReplica::MonitorReplica(ReplicaId id, const SystemView& sys)
    : Replica(id, sys) {
  const auto& t = sys.thresholds();
  switch (id.cluster) {
    case ClusterRole::AgreementMonitor:
      loop_ = LoopKind::Agreement;
      source_cluster_ = ClusterRole::Committer;
      ts_ = t.ts_agreement;
      peer_threshold_ = t.peer_agreement;
      break;
    case ClusterRole::CompletionMonitor:
      loop_ = LoopKind::Completion;
      source_cluster_ = ClusterRole::Executor;
      ts_ = t.ts_completion;
      peer_threshold_ = t.peer_completion;
      break;
    default:
      loop_ = LoopKind::View;
      source_cluster_ = ClusterRole::Controller;
      ts_ = t.ts_view;
      peer_threshold_ = t.peer_view;
      break;
  }
}

void MonitorReplica::on_message(const Envelope& env, Context& ctx) {
  (void)ctx;
  switch (env.kind) {
    case MessageKind::CompletionReport: {
      if (loop_ != LoopKind::Completion ||
          env.sender.cluster != source_cluster_) {
        return;
      }
      if (const auto* body = env.as<CompletionReportBody>()) {
        sources_a_.report(env.sender, body->slots);
        sources_b_.report(env.sender, body->commands);
      }
      break;
    }
    case MessageKind::AgreementReport: {
      if (loop_ != LoopKind::Agreement ||
          env.sender.cluster != source_cluster_) {
        return;
      }
      if (const auto* body = env.as<AgreementReportBody>()) {
        sources_a_.report(env.sender, body->active);
      }
      break;
    }
    case MessageKind::ViewAnnounce: {
      if (loop_ != LoopKind::View || env.sender.cluster != source_cluster_) {
        return;
      }
      if (const auto* body = env.as<ViewAnnounceBody>()) {
        sources_a_.report(env.sender, body->view);
      }
      break;
    }
    case MessageKind::MonitorForward: {
      if (env.sender.cluster != id_.cluster) return;
      const auto* body = env.as<MonitorForwardBody>();
      if (body == nullptr || body->loop != loop_) return;
      peers_a_.report(env.sender, body->a);
      peers_b_.report(env.sender, body->b);
      break;
    }
    default:
      return;
  }
  // Accept on t_s matching source inputs or forwarded peer values. Values
  // are monotone, so the threshold-th highest is the safe aggregate.
  if (auto v = sources_a_.highest(ts_); v && *v > accepted_a_) accepted_a_ = *v;
  if (auto v = peers_a_.highest(peer_threshold_); v && *v > accepted_a_) {
    accepted_a_ = *v;
  }
  if (auto v = sources_b_.highest(ts_); v && *v > accepted_b_) accepted_b_ = *v;
  if (auto v = peers_b_.highest(peer_threshold_); v && *v > accepted_b_) {
    accepted_b_ = *v;
  }
}

void MonitorReplica::on_tick(Context& ctx) {
  ctx.out.broadcast(id_.cluster, MessageKind::MonitorForward,
                    MonitorForwardBody{loop_, accepted_a_, accepted_b_},
                    id_.index);
  MonitorValueBody value{loop_, accepted_a_, accepted_b_};
  for (const auto& edge : sys().bp->edges) {
    if (edge.producer == id_.cluster && edge.kind == MessageKind::MonitorValue) {
      ctx.out.broadcast(edge.consumer, MessageKind::MonitorValue, value);
    }
  }
}

}  // namespace shellft::proto
