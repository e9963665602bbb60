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

#include "shellft/sim/checkers.hpp"

#include <map>
#include <set>
#include <sstream>

#include "shellft/app/kv.hpp"

namespace shellft::sim {

std::string Verdict::str() const {
  std::ostringstream out;
  out << (pass ? "PASS" : "FAIL");
  for (const auto& reason : reasons) out << "\n  " << reason;
  return out.str();
}

Verdict check_safety(const TraceFile& trace) {
  Verdict verdict;
  std::map<uint64_t, std::map<Digest, ReplicaId>> commits;  // seq -> digests
  std::map<Digest, std::pair<std::pair<uint32_t, uint64_t>, std::string>> defs;
  std::map<ReplicaId, uint64_t> frontier;
  std::map<uint64_t, std::set<Digest>> correct_checkpoints;  // number -> digests

  for (const auto& rec : trace.records) {
    switch (rec.kind) {
      case TraceKind::CommandDef:
        defs[rec.digest] = {{rec.client, rec.counter}, rec.text};
        break;
      case TraceKind::Commit: {
        if (!trace.is_correct(rec.who)) break;
        auto& seen = commits[rec.seq];
        seen.emplace(rec.digest, rec.who);
        if (seen.size() > 1) {
          std::ostringstream reason;
          reason << "divergent commit at seq " << rec.seq << ":";
          for (const auto& [digest, who] : seen) {
            reason << " " << who.str() << "->" << digest;
          }
          verdict.fail(reason.str());
        }
        break;
      }
      case TraceKind::Execute: {
        if (!trace.is_correct(rec.who)) break;
        uint64_t expected = frontier[rec.who];
        if (rec.seq != expected) {
          verdict.fail(rec.who.str() + " executed seq " +
                       std::to_string(rec.seq) + ", expected " +
                       std::to_string(expected));
        }
        frontier[rec.who] = rec.seq + 1;
        break;
      }
      case TraceKind::Checkpoint:
        if (trace.is_correct(rec.who)) {
          correct_checkpoints[rec.seq].insert(rec.digest);
        }
        break;
      case TraceKind::CheckpointInstall: {
        if (!trace.is_correct(rec.who)) break;
        auto it = correct_checkpoints.find(rec.seq);
        if (it == correct_checkpoints.end() || !it->second.count(rec.digest)) {
          verdict.fail(rec.who.str() + " installed foreign checkpoint " +
                       std::to_string(rec.seq) + "/" +
                       std::to_string(rec.digest));
        } else {
          frontier[rec.who] = rec.seq;
        }
        break;
      }
      case TraceKind::Alarm:
        if (trace.is_correct(rec.who)) {
          verdict.fail(rec.who.str() + " raised alarm: " + rec.text);
        }
        break;
      default:
        break;
    }
  }

  // Reply oracle: sequentially re-execute the committed order with the
  // executor's deduplication rule and compare against delivered replies.
  app::KvState oracle;
  std::map<std::pair<uint32_t, uint64_t>, Digest> expected_reply;
  uint64_t next_seq = 0;
  for (const auto& [seq, digests] : commits) {
    if (digests.size() != 1) break;  // already failed above
    if (seq != next_seq) break;      // a gap ends the deterministic prefix
    ++next_seq;
    Digest digest = digests.begin()->first;
    auto def = defs.find(digest);
    if (def == defs.end()) continue;
    const auto& [key, payload] = def->second;
    if (key.first == 0) continue;             // noop
    if (expected_reply.count(key)) continue;  // duplicate: first wins
    expected_reply[key] = fnv1a(oracle.apply(payload));
  }
  for (const auto& rec : trace.records) {
    if (rec.kind != TraceKind::ReplyDeliver) continue;
    auto it = expected_reply.find({rec.client, rec.counter});
    if (it == expected_reply.end()) {
      verdict.fail("client " + std::to_string(rec.client) +
                   " delivered reply for uncommitted counter " +
                   std::to_string(rec.counter));
    } else if (it->second != rec.digest) {
      verdict.fail("client " + std::to_string(rec.client) + " counter " +
                   std::to_string(rec.counter) + " delivered reply " +
                   std::to_string(rec.digest) + ", oracle says " +
                   std::to_string(it->second));
    }
  }
  return verdict;
}

Verdict check_liveness(const TraceFile& trace, uint64_t settle_ms,
                       uint64_t gst_ms) {
  Verdict verdict;
  if (gst_ms + settle_ms > trace.horizon_ms) {
    verdict.reasons.push_back(
        "nothing to assert: gst + settle exceeds the horizon");
    return verdict;
  }
  uint64_t cutoff =
      trace.horizon_ms > settle_ms ? trace.horizon_ms - settle_ms : 0;
  std::set<std::pair<uint32_t, uint64_t>> eligible;
  for (const auto& rec : trace.records) {
    if (rec.kind == TraceKind::FeAccept && rec.time <= cutoff &&
        trace.is_correct(rec.who)) {
      eligible.insert({rec.client, rec.counter});
    }
  }
  // First committed slot per command (any correct executor).
  std::map<std::pair<uint32_t, uint64_t>, uint64_t> commit_seq;
  std::map<Digest, std::pair<uint32_t, uint64_t>> def_key;
  std::map<ReplicaId, uint64_t> frontier;
  for (const auto& rec : trace.records) {
    switch (rec.kind) {
      case TraceKind::CommandDef:
        def_key[rec.digest] = {rec.client, rec.counter};
        break;
      case TraceKind::Commit: {
        if (!trace.is_correct(rec.who)) break;
        auto it = def_key.find(rec.digest);
        if (it != def_key.end()) {
          commit_seq.try_emplace(it->second, rec.seq);
        }
        break;
      }
      case TraceKind::Execute:
        if (trace.is_correct(rec.who)) {
          frontier[rec.who] = std::max(frontier[rec.who], rec.seq + 1);
        }
        break;
      case TraceKind::CheckpointInstall:
        if (trace.is_correct(rec.who)) {
          frontier[rec.who] = std::max(frontier[rec.who], rec.seq);
        }
        break;
      default:
        break;
    }
  }
  auto executors = trace.correct_members(ClusterRole::Executor);
  for (const auto& key : eligible) {
    auto commit = commit_seq.find(key);
    if (commit == commit_seq.end()) {
      verdict.fail("command (" + std::to_string(key.first) + "," +
                   std::to_string(key.second) + ") accepted but never " +
                   "committed by a correct executor");
      continue;
    }
    for (const auto& executor : executors) {
      if (frontier[executor] <= commit->second) {
        verdict.fail("command (" + std::to_string(key.first) + "," +
                     std::to_string(key.second) + ") at seq " +
                     std::to_string(commit->second) + " not executed by " +
                     executor.str());
      }
    }
  }
  return verdict;
}

}  // namespace shellft::sim
