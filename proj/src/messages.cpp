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

#include "shellft/core/messages.hpp"

namespace shellft {

std::string_view message_kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::ClientRequest: return "client_request";
    case MessageKind::CommandGossip: return "command_gossip";
    case MessageKind::CommandOffer: return "command_offer";
    case MessageKind::SubmissionProgress: return "submission_progress";
    case MessageKind::Proposal: return "proposal";
    case MessageKind::PrepareOpinion: return "prepare_opinion";
    case MessageKind::Confirm: return "confirm";
    case MessageKind::Reply: return "reply";
    case MessageKind::ReplyRequest: return "reply_request";
    case MessageKind::CompletionReport: return "completion_report";
    case MessageKind::AgreementReport: return "agreement_report";
    case MessageKind::ViewAnnounce: return "view_announce";
    case MessageKind::MonitorForward: return "monitor_forward";
    case MessageKind::MonitorValue: return "monitor_value";
    case MessageKind::ViewChangeReport: return "view_change_report";
    case MessageKind::PreparedEvidence: return "prepared_evidence";
    case MessageKind::CommittedEvidence: return "committed_evidence";
    case MessageKind::ConservatorReport: return "conservator_report";
    case MessageKind::NewViewProposal: return "new_view_proposal";
    case MessageKind::DecisionVoucher: return "decision_voucher";
    case MessageKind::DecisionResponse: return "decision_response";
    case MessageKind::ViewChangeReject: return "view_change_reject";
    case MessageKind::CheckpointRequest: return "checkpoint_request";
    case MessageKind::CheckpointResponse: return "checkpoint_response";
  }
  return "unknown";
}

std::string_view loop_name(LoopKind loop) {
  switch (loop) {
    case LoopKind::Agreement: return "agreement";
    case LoopKind::Completion: return "completion";
    case LoopKind::View: return "view";
  }
  return "unknown";
}

Digest digest_of(const NewViewDecision& decision) {
  Digest h = fnv1a_u64(decision.view, 0xcbf29ce484222325ull);
  for (const auto& slot : decision.repropose) {
    h = fnv1a_u64(slot.seq, h);
    h = fnv1a_u64(digest_of(slot.cmd), h);
  }
  return h;
}

}  // namespace shellft
