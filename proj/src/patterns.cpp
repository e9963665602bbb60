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

#include "shellft/patterns/patterns.hpp"

#include <array>
#include <sstream>

#include "shellft/core/rng.hpp"

namespace shellft::patterns {

PatternInstance make_rdp(PatternVariant variant, uint32_t f) {
  PatternInstance inst;
  inst.kind = PatternKind::ReliableDistribution;
  inst.variant = variant;
  inst.f = f;
  inst.source_count = 1;
  inst.sink_count = 2 * f + 1;
  if (variant == PatternVariant::BFT) {
    inst.witness_or_relay_count = 3 * f + 1;
    inst.sink_threshold = 2 * f + 1;
  } else {
    inst.witness_or_relay_count = 0;
    inst.sink_threshold = 1;
  }
  return inst;
}

PatternInstance make_relay(PatternVariant variant, uint32_t f) {
  PatternInstance inst;
  inst.kind = PatternKind::Relay;
  inst.variant = variant;
  inst.f = f;
  inst.witness_or_relay_count = 2 * f + 1;
  inst.sink_count = 2 * f + 1;
  inst.sink_threshold = f + 1;
  if (variant == PatternVariant::BFT) {
    inst.source_count = 3 * f + 1;
    inst.source_threshold = 2 * f + 1;
  } else {
    inst.source_count = 2 * f + 1;
    inst.source_threshold = f + 1;
  }
  return inst;
}

PatternInstance transform(const PatternInstance& inst, bool source_is_shell) {
  if (!source_is_shell || inst.variant == PatternVariant::BFT) return inst;
  if (inst.kind == PatternKind::ReliableDistribution) {
    auto out = make_rdp(PatternVariant::BFT, inst.f);
    out.sink_count = inst.sink_count;
    return out;
  }
  auto out = make_relay(PatternVariant::BFT, inst.f);
  out.sink_count = inst.sink_count;
  return out;
}

std::vector<std::optional<Value>> rdp_run(
    const PatternInstance& inst, const std::vector<Value>& source_behavior,
    const std::map<uint32_t, std::vector<Value>>& witness_faults) {
  std::vector<std::optional<Value>> accepted(inst.sink_count);
  if (inst.variant == PatternVariant::CFT) {
    // The source broadcasts directly; a sink takes what it is handed.
    for (uint32_t s = 0; s < inst.sink_count; ++s) {
      Value v = s < source_behavior.size() ? source_behavior[s] : kNone;
      if (v != kNone) accepted[s] = v;
    }
    return accepted;
  }
  // Witnesses observe the source's (possibly equivocating) proposal and
  // report their opinion to every sink; sinks accept on matching opinions
  // from sink_threshold witnesses.
  for (uint32_t s = 0; s < inst.sink_count; ++s) {
    std::array<uint32_t, 3> count = {0, 0, 0};
    for (uint32_t w = 0; w < inst.witness_or_relay_count; ++w) {
      Value v;
      auto fault = witness_faults.find(w);
      if (fault != witness_faults.end()) {
        v = s < fault->second.size() ? fault->second[s] : kNone;
      } else {
        v = w < source_behavior.size() ? source_behavior[w] : kNone;
      }
      if (v != kNone && v < 3) ++count[v];
    }
    for (Value v = 1; v < 3; ++v) {
      if (count[v] >= inst.sink_threshold) {
        accepted[s] = v;
        break;  // thresholds guarantee at most one value can qualify
      }
    }
  }
  return accepted;
}

std::vector<std::optional<Value>> relay_run(
    const PatternInstance& inst,
    const std::vector<std::vector<Value>>& source_values,
    const std::vector<RelayCrash>& relay_faults) {
  const uint32_t relays = inst.witness_or_relay_count;
  const uint32_t sinks = inst.sink_count;
  const uint32_t rounds = inst.source_count + relays + sinks + 2;

  // Per-relay source quorum, available from round 0.
  std::vector<Value> from_sources(relays, kNone);
  for (uint32_t r = 0; r < relays; ++r) {
    std::array<uint32_t, 3> count = {0, 0, 0};
    for (const auto& sv : source_values) {
      Value v = r < sv.size() ? sv[r] : kNone;
      if (v != kNone && v < 3) ++count[v];
    }
    for (Value v = 1; v < 3; ++v) {
      if (count[v] >= inst.source_threshold) {
        from_sources[r] = v;
        break;
      }
    }
  }

  auto crash_of = [&relay_faults](uint32_t r) -> const RelayCrash* {
    for (const auto& c : relay_faults) {
      if (c.relay == r) return &c;
    }
    return nullptr;
  };

  std::vector<Value> accepted(relays, kNone);
  // forwards staged for delivery at the start of the next round
  std::vector<Value> inbox(relays, kNone), inbox_next(relays, kNone);
  std::vector<std::vector<Value>> sink_opinion(
      sinks, std::vector<Value>(relays, kNone));
  std::vector<std::vector<Value>> sink_next = sink_opinion;

  for (uint32_t round = 0; round < rounds; ++round) {
    for (uint32_t r = 0; r < relays; ++r) {
      if (accepted[r] != kNone) continue;
      if (from_sources[r] != kNone) {
        accepted[r] = from_sources[r];
      } else if (inbox[r] != kNone) {
        // one forwarded accepted value from another relay suffices
        accepted[r] = inbox[r];
      }
    }
    for (uint32_t r = 0; r < relays; ++r) {
      if (accepted[r] == kNone) continue;
      const RelayCrash* crash = crash_of(r);
      if (crash != nullptr && round > crash->round) continue;
      bool partial = crash != nullptr && round == crash->round;
      uint32_t bit = 0;
      for (uint32_t p = 0; p < relays; ++p) {
        if (p == r) continue;
        bool sent = !partial || (crash->sent_mask >> bit) & 1;
        ++bit;
        if (sent && inbox_next[p] == kNone) inbox_next[p] = accepted[r];
      }
      for (uint32_t s = 0; s < sinks; ++s) {
        bool sent = !partial || (crash->sent_mask >> bit) & 1;
        ++bit;
        if (sent && sink_next[s][r] == kNone) sink_next[s][r] = accepted[r];
      }
    }
    inbox = inbox_next;
    sink_opinion = sink_next;
  }

  std::vector<std::optional<Value>> result(sinks);
  for (uint32_t s = 0; s < sinks; ++s) {
    std::array<uint32_t, 3> count = {0, 0, 0};
    for (uint32_t r = 0; r < relays; ++r) {
      Value v = sink_opinion[s][r];
      if (v != kNone && v < 3) ++count[v];
    }
    for (Value v = 1; v < 3; ++v) {
      if (count[v] >= inst.sink_threshold) {
        result[s] = v;
        break;
      }
    }
  }
  return result;
}

namespace {

uint64_t pow_u64(uint64_t base, uint32_t exp) {
  uint64_t out = 1;
  while (exp--) out *= base;
  return out;
}

void decode_base3(uint64_t code, std::vector<Value>& out) {
  for (auto& v : out) {
    v = static_cast<Value>(code % 3);
    code /= 3;
  }
}

struct Checker {
  PropertyResult safety;
  PropertyResult liveness;
  uint64_t enumerated = 0;
  uint64_t budget;

  explicit Checker(uint64_t budget) : budget(budget) {}

  bool over_budget() const { return enumerated > budget; }

  void check_agreement(const std::vector<std::optional<Value>>& accepted,
                       const std::string& label) {
    ++safety.cases;
    for (size_t i = 0; i < accepted.size(); ++i) {
      for (size_t j = i + 1; j < accepted.size(); ++j) {
        if (accepted[i] && accepted[j] && *accepted[i] != *accepted[j]) {
          if (safety.violations++ == 0) safety.first_counterexample = label;
          return;
        }
      }
    }
  }

  void check_all_accept(const std::vector<std::optional<Value>>& accepted,
                        Value expected, const std::string& label) {
    ++liveness.cases;
    for (const auto& a : accepted) {
      if (!a || *a != expected) {
        if (liveness.violations++ == 0) liveness.first_counterexample = label;
        return;
      }
    }
  }

  // RP.2: whenever one correct sink accepts, all must have by run end.
  void check_uniform(const std::vector<std::optional<Value>>& accepted,
                     const std::string& label) {
    ++liveness.cases;
    bool any = false;
    for (const auto& a : accepted) any = any || a.has_value();
    if (!any) return;
    for (const auto& a : accepted) {
      if (!a || *a != *accepted[0]) {
        if (liveness.violations++ == 0) liveness.first_counterexample = label;
        return;
      }
    }
  }
};

std::string behavior_label(const std::vector<Value>& behavior) {
  std::string out = "source=";
  for (auto v : behavior) out += static_cast<char>('0' + v);
  return out;
}

PatternCheckReport finish(Checker& checker, const char* safety_name,
                          const char* liveness_name) {
  PatternCheckReport report;
  checker.safety.name = safety_name;
  checker.liveness.name = liveness_name;
  report.enumerated = checker.enumerated;
  report.exploded = checker.over_budget();
  report.properties = {checker.safety, checker.liveness};
  report.pass = !report.exploded && checker.safety.violations == 0 &&
                checker.liveness.violations == 0;
  return report;
}

PatternCheckReport check_rdp(const PatternInstance& inst, uint64_t budget) {
  Checker checker(budget);
  const uint32_t W = inst.witness_or_relay_count;
  const uint32_t S = inst.sink_count;

  if (inst.variant == PatternVariant::CFT) {
    // Legal crash behavior: the source reaches an arbitrary subset of
    // sinks with its value before failing.
    std::vector<Value> behavior(S);
    for (uint32_t mask = 0; mask < (1u << S) && !checker.over_budget(); ++mask) {
      for (uint32_t s = 0; s < S; ++s) behavior[s] = (mask >> s) & 1 ? 1 : kNone;
      ++checker.enumerated;
      auto accepted = rdp_run(inst, behavior, {});
      checker.check_agreement(accepted, behavior_label(behavior));
      if (mask + 1 == (1u << S)) {  // full broadcast: the correct source
        checker.check_all_accept(accepted, 1, behavior_label(behavior));
      }
    }
    return finish(checker, "RDP.1", "RDP.2");
  }

  std::vector<Value> behavior(W);
  std::vector<Value> lie(S);
  const uint64_t behaviors = pow_u64(3, W);
  const uint64_t lies = pow_u64(3, S);
  for (uint64_t b = 0; b < behaviors && !checker.over_budget(); ++b) {
    decode_base3(b, behavior);
    bool source_correct = true;
    for (auto v : behavior) source_correct = source_correct && v == behavior[0];
    source_correct = source_correct && behavior[0] != kNone;
    // no faulty witness
    {
      ++checker.enumerated;
      auto accepted = rdp_run(inst, behavior, {});
      checker.check_agreement(accepted, behavior_label(behavior));
      if (source_correct) {
        checker.check_all_accept(accepted, behavior[0], behavior_label(behavior));
      }
    }
    // one faulty witness (f=1), arbitrary per-sink reports
    for (uint32_t w = 0; w < W; ++w) {
      for (uint64_t l = 0; l < lies && !checker.over_budget(); ++l) {
        decode_base3(l, lie);
        ++checker.enumerated;
        auto accepted = rdp_run(inst, behavior, {{w, lie}});
        std::string label =
            behavior_label(behavior) + " witness" + std::to_string(w);
        checker.check_agreement(accepted, label);
        if (source_correct) {
          checker.check_all_accept(accepted, behavior[0], label);
        }
      }
    }
  }
  return finish(checker, "RDP.1", "RDP.2");
}

PatternCheckReport check_relay(const PatternInstance& inst, uint64_t budget) {
  Checker checker(budget);
  const uint32_t N = inst.source_count;
  const uint32_t R = inst.witness_or_relay_count;
  const uint32_t S = inst.sink_count;
  const uint32_t rounds = N + R + S + 2;
  const uint32_t mask_bits = (R - 1) + S;
  const bool byzantine_sources = inst.variant == PatternVariant::BFT;

  // Enumerate source profiles: every correct source proposes the common
  // value or stays silent; one source is faulty — a crash reaching a
  // subset of relays (CFT) or arbitrary per-relay values (BFT).
  std::vector<std::vector<Value>> sources(N, std::vector<Value>(R, kNone));
  std::vector<Value> fault_assign(R);
  const uint64_t fault_space =
      byzantine_sources ? pow_u64(3, R) : pow_u64(2, R);

  std::vector<RelayCrash> no_crash;
  std::vector<RelayCrash> one_crash(1);

  // RP.1: an accepted value must have been proposed by a correct source —
  // the common value 1, and only when some correct source actually put it
  // out.
  auto check_origin = [&checker](const std::vector<std::optional<Value>>& accepted,
                                 bool correct_proposed, const std::string& label) {
    for (const auto& a : accepted) {
      if (a && (*a != 1 || !correct_proposed)) {
        if (checker.safety.violations++ == 0) {
          checker.safety.first_counterexample = label + " foreign value";
        }
        return;
      }
    }
  };

  auto run_all_relay_faults = [&](const std::string& label, bool correct_proposed) {
    // fault-free
    ++checker.enumerated;
    {
      auto accepted = relay_run(inst, sources, no_crash);
      checker.check_agreement(accepted, label);
      checker.check_uniform(accepted, label);
      check_origin(accepted, correct_proposed, label);
    }
    // one crashing relay: every crash round and partial-send mask
    for (uint32_t r = 0; r < R && !checker.over_budget(); ++r) {
      for (uint32_t round = 0; round < rounds; ++round) {
        for (uint32_t mask = 0; mask < (1u << mask_bits); ++mask) {
          ++checker.enumerated;
          one_crash[0] = RelayCrash{r, round, mask};
          auto accepted = relay_run(inst, sources, one_crash);
          std::string crash_label =
              label + " crash=" + std::to_string(r) + "@" + std::to_string(round);
          checker.check_agreement(accepted, crash_label);
          checker.check_uniform(accepted, crash_label);
          check_origin(accepted, correct_proposed, crash_label);
        }
        if (checker.over_budget()) break;
      }
    }
  };

  // silent_mask selects which correct sources propose value 1.
  for (uint32_t faulty = 0; faulty <= N && !checker.over_budget(); ++faulty) {
    bool has_fault = faulty < N;  // faulty == N encodes "no faulty source"
    uint64_t assigns = has_fault ? fault_space : 1;
    for (uint64_t fa = 0; fa < assigns && !checker.over_budget(); ++fa) {
      if (has_fault) {
        if (byzantine_sources) {
          decode_base3(fa, fault_assign);
        } else {
          for (uint32_t r = 0; r < R; ++r) {
            fault_assign[r] = (fa >> r) & 1 ? 1 : kNone;  // crash subset
          }
        }
      }
      uint32_t correct_count = has_fault ? N - 1 : N;
      for (uint32_t silent = 0; silent < (1u << correct_count); ++silent) {
        uint32_t bit = 0;
        bool any_correct_proposed = false;
        for (uint32_t src = 0; src < N; ++src) {
          if (has_fault && src == faulty) {
            sources[src] = fault_assign;
            continue;
          }
          bool proposes = (silent >> bit) & 1;
          ++bit;
          any_correct_proposed = any_correct_proposed || proposes;
          std::fill(sources[src].begin(), sources[src].end(),
                    proposes ? Value{1} : kNone);
        }
        // In the crash variant, the crashing source's partial broadcast is
        // still a correct proposal of the common value.
        bool correct_proposed =
            any_correct_proposed || (has_fault && !byzantine_sources && fa != 0);
        std::string label = "faulty=" +
                            (has_fault ? std::to_string(faulty) : "none") +
                            " silent=" + std::to_string(silent);
        run_all_relay_faults(label, correct_proposed);
        if (checker.over_budget()) break;
      }
    }
  }
  return finish(checker, "RP.1", "RP.2");
}

}  // namespace

std::string PatternCheckReport::str() const {
  std::ostringstream out;
  for (const auto& p : properties) {
    out << p.name << ": " << p.cases << " cases, " << p.violations
        << " counterexamples";
    if (p.violations > 0) out << " (first: " << p.first_counterexample << ")";
    out << "\n";
  }
  out << "enumerated " << enumerated << " adversaries: "
      << (exploded ? "EXPLODED" : (pass ? "pass" : "FAIL")) << "\n";
  return out.str();
}

PatternCheckReport check_pattern_properties(const PatternInstance& inst,
                                            uint64_t budget) {
  if (inst.f != 1) {
    // Exhaustive enumeration is bounded to f=1; use sampling beyond.
    PatternCheckReport report;
    report.exploded = true;
    return report;
  }
  if (inst.kind == PatternKind::ReliableDistribution) {
    return check_rdp(inst, budget);
  }
  return check_relay(inst, budget);
}

PatternCheckReport check_rdp_cft_equivocator(uint32_t f) {
  auto inst = make_rdp(PatternVariant::CFT, f);
  Checker checker(1'000'000);
  const uint32_t S = inst.sink_count;
  std::vector<Value> behavior(S);
  const uint64_t behaviors = pow_u64(3, S);
  for (uint64_t b = 0; b < behaviors; ++b) {
    decode_base3(b, behavior);
    ++checker.enumerated;
    auto accepted = rdp_run(inst, behavior, {});
    checker.check_agreement(accepted, behavior_label(behavior));
  }
  auto report = finish(checker, "RDP.1", "RDP.2");
  // The control case passes when the checker detects the CFT weakness.
  report.pass = report.properties[0].violations >= 1;
  return report;
}

PatternCheckReport sample_pattern_properties(const PatternInstance& inst,
                                             uint64_t samples, uint64_t seed) {
  Checker checker(samples + 1);
  Rng rng(seed);
  const uint32_t R = inst.witness_or_relay_count;
  const uint32_t S = inst.sink_count;
  for (uint64_t i = 0; i < samples; ++i) {
    ++checker.enumerated;
    if (inst.kind == PatternKind::ReliableDistribution) {
      std::vector<Value> behavior(inst.variant == PatternVariant::BFT ? R : S);
      for (auto& v : behavior) v = static_cast<Value>(rng.uniform(0, 2));
      std::map<uint32_t, std::vector<Value>> faults;
      uint32_t fcount = inst.variant == PatternVariant::BFT
                            ? static_cast<uint32_t>(rng.uniform(0, inst.f))
                            : 0;
      while (faults.size() < fcount) {
        std::vector<Value> lie(S);
        for (auto& v : lie) v = static_cast<Value>(rng.uniform(0, 2));
        faults[static_cast<uint32_t>(rng.uniform(0, R - 1))] = lie;
      }
      if (inst.variant == PatternVariant::CFT) {
        // stay within the crash model: a single value, partial broadcast
        for (auto& v : behavior) v = v == kNone ? kNone : 1;
      }
      auto accepted = rdp_run(inst, behavior, faults);
      checker.check_agreement(accepted, "sample " + std::to_string(i));
      bool correct = true;
      for (auto v : behavior) correct = correct && v == 1;
      if (correct) {
        checker.check_all_accept(accepted, 1, "sample " + std::to_string(i));
      }
    } else {
      std::vector<std::vector<Value>> sources(inst.source_count,
                                              std::vector<Value>(R, kNone));
      uint32_t faulty_budget = inst.f;
      for (uint32_t src = 0; src < inst.source_count; ++src) {
        bool faulty = faulty_budget > 0 && rng.chance(0.3);
        if (faulty && inst.variant == PatternVariant::BFT) {
          --faulty_budget;
          for (auto& v : sources[src]) v = static_cast<Value>(rng.uniform(0, 2));
        } else if (faulty) {
          --faulty_budget;
          for (auto& v : sources[src]) v = rng.chance(0.5) ? 1 : kNone;
        } else if (rng.chance(0.8)) {
          std::fill(sources[src].begin(), sources[src].end(), Value{1});
        }
      }
      std::vector<RelayCrash> crashes;
      uint32_t crash_budget = static_cast<uint32_t>(rng.uniform(0, inst.f));
      for (uint32_t c = 0; c < crash_budget; ++c) {
        crashes.push_back(RelayCrash{
            static_cast<uint32_t>(rng.uniform(0, R - 1)),
            static_cast<uint32_t>(rng.uniform(0, R + S + 2)),
            static_cast<uint32_t>(rng.uniform(0, (1u << (R - 1 + S)) - 1))});
      }
      auto accepted = relay_run(inst, sources, crashes);
      checker.check_agreement(accepted, "sample " + std::to_string(i));
      checker.check_uniform(accepted, "sample " + std::to_string(i));
    }
  }
  return finish(checker,
                inst.kind == PatternKind::Relay ? "RP.1" : "RDP.1",
                inst.kind == PatternKind::Relay ? "RP.2" : "RDP.2");
}

}  // namespace shellft::patterns
