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

#ifndef SHELLFT_CORE_MESSAGES_HPP_
#define SHELLFT_CORE_MESSAGES_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shellft/core/ids.hpp"

namespace shellft {

enum class MessageKind : uint8_t {
  ClientRequest,      // client -> front end
  CommandGossip,      // front end -> front end
  CommandOffer,       // front end -> proposer
  SubmissionProgress, // front end -> controller
  Proposal,           // proposer -> committer | preparer
  PrepareOpinion,     // preparer -> committer
  Confirm,            // committer -> executor
  Reply,              // executor -> client
  ReplyRequest,       // client -> executor
  CompletionReport,   // executor -> completion monitor
  AgreementReport,    // committer -> agreement monitor
  ViewAnnounce,       // controller -> view monitor
  MonitorForward,     // monitor -> monitor (same loop)
  MonitorValue,       // monitor -> observer hosts
  ViewChangeReport,   // committer -> proposer (base / adapted view change)
  PreparedEvidence,   // preparer -> conservator
  CommittedEvidence,  // committer -> conservator
  ConservatorReport,  // conservator -> curator, auditor
  NewViewProposal,    // curator -> auditor
  DecisionVoucher,    // auditor -> record keeper
  DecisionResponse,   // record keeper -> proposer, preparer
  ViewChangeReject,   // auditor -> controller
  CheckpointRequest,  // executor -> executor
  CheckpointResponse, // executor -> executor
};

std::string_view message_kind_name(MessageKind kind);

enum class LoopKind : uint8_t { Agreement, Completion, View };

std::string_view loop_name(LoopKind loop);

struct SlotCommand {
  uint64_t seq = 0;
  Command cmd;
  bool operator==(const SlotCommand&) const = default;
};

// A per-slot claim: (view, seq, command) as accepted by the reporter.
struct SlotEntry {
  uint64_t view = 0;
  uint64_t seq = 0;
  Command cmd;
  bool operator==(const SlotEntry&) const = default;
};

struct ReplyEntry {
  uint32_t client = 0;
  uint64_t counter = 0;
  std::string bytes;
};

struct ClientRequestBody { std::vector<Command> commands; };
struct CommandGossipBody { std::vector<Command> commands; };
struct CommandOfferBody { std::vector<Command> commands; };
struct SubmissionProgressBody { uint64_t accepted = 0; };

struct ProposalBody {
  uint64_t view = 0;
  std::vector<SlotCommand> slots;
};

struct PrepareOpinionBody { std::vector<SlotEntry> entries; };
struct ConfirmBody { std::vector<SlotEntry> entries; };
struct ReplyBody { std::vector<ReplyEntry> entries; };
struct ReplyRequestBody { std::vector<uint64_t> counters; };

// Monotone progress counters. `slots` is the count of contiguously
// executed sequence numbers, `commands` the count of executed non-noop
// commands (no-op fillers must not satisfy the controller's progress
// test).
struct CompletionReportBody {
  uint64_t slots = 0;
  uint64_t commands = 0;
};

struct AgreementReportBody { uint64_t active = 0; };
struct ViewAnnounceBody { uint64_t view = 0; };

struct MonitorForwardBody {
  LoopKind loop = LoopKind::Completion;
  uint64_t a = 0;
  uint64_t b = 0;
};

struct MonitorValueBody {
  LoopKind loop = LoopKind::Completion;
  uint64_t a = 0;
  uint64_t b = 0;
};

// Per-slot history for a pending view change.
struct SlotHistoryBody {
  uint64_t target_view = 0;
  std::vector<SlotEntry> entries;
};

struct ConservatorReportBody {
  uint64_t target_view = 0;
  std::vector<SlotEntry> certified;
  std::vector<SlotEntry> prepared;
};

struct NewViewDecision {
  uint64_t view = 0;
  std::vector<SlotCommand> repropose;  // sorted by seq
};

Digest digest_of(const NewViewDecision& decision);

struct NewViewProposalBody { NewViewDecision decision; };
struct DecisionVoucherBody { NewViewDecision decision; };
struct DecisionResponseBody { NewViewDecision decision; };
struct ViewChangeRejectBody { uint64_t view = 0; };

struct CheckpointRequestBody { uint64_t number = 0; };
struct CheckpointResponseBody {
  uint64_t number = 0;
  std::string snapshot;
};

using Body = std::variant<
    ClientRequestBody, CommandGossipBody, CommandOfferBody,
    SubmissionProgressBody, ProposalBody, PrepareOpinionBody, ConfirmBody,
    ReplyBody, ReplyRequestBody, CompletionReportBody, AgreementReportBody,
    ViewAnnounceBody, MonitorForwardBody, MonitorValueBody, SlotHistoryBody,
    ConservatorReportBody, NewViewProposalBody, DecisionVoucherBody,
    DecisionResponseBody, ViewChangeRejectBody, CheckpointRequestBody,
    CheckpointResponseBody>;

// An authenticated message. The sender field is stamped by the sending
// replica's outbox and can never name another replica: Byzantine behavior
// is limited to arbitrary bodies under the replica's own identity.
struct Envelope {
  ReplicaId sender;
  MessageKind kind = MessageKind::ClientRequest;
  std::shared_ptr<const Body> body;
  uint64_t auth = 0;

  template <typename T>
  const T* as() const {
    return body ? std::get_if<T>(body.get()) : nullptr;
  }
};

// Authenticity is modeled, not cryptographic: the default implementation
// stamps a keyed hash over (sender, kind). A keyed-MAC implementation can
// be swapped in without touching protocol logic.
class Authenticator {
 public:
  virtual ~Authenticator() = default;
  virtual uint64_t stamp(const ReplicaId& sender, MessageKind kind) const = 0;
  virtual bool verify(const Envelope& env) const = 0;
};

class ModeledAuthenticator final : public Authenticator {
 public:
  explicit ModeledAuthenticator(uint64_t key = 0x5107e11f7a57ull) : key_(key) {}

  uint64_t stamp(const ReplicaId& sender, MessageKind kind) const override {
    uint64_t h = key_;
    h = fnv1a_u64(static_cast<uint64_t>(sender.cluster), h);
    h = fnv1a_u64(sender.index, h);
    return fnv1a_u64(static_cast<uint64_t>(kind), h);
  }

  bool verify(const Envelope& env) const override {
    return env.auth == stamp(env.sender, env.kind);
  }

 private:
  uint64_t key_;
};

}  // namespace shellft

#endif  // SHELLFT_CORE_MESSAGES_HPP_
