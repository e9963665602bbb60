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

#include "shellft/sim/campaign.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

namespace shellft::sim {

namespace {

std::vector<uint32_t> pick_distinct(Rng& rng, uint32_t count, uint32_t size) {
  std::set<uint32_t> chosen;
  while (chosen.size() < count && chosen.size() < size) {
    chosen.insert(static_cast<uint32_t>(rng.uniform(0, size - 1)));
  }
  return {chosen.begin(), chosen.end()};
}

uint64_t fault_time(Rng& rng, uint64_t horizon_ms) {
  return rng.uniform(500, horizon_ms * 2 / 5);
}

std::vector<FaultKind> applicable_byzantine_kinds(ClusterRole role) {
  std::vector<FaultKind> kinds;
  for (auto kind : {FaultKind::EquivocateProposals, FaultKind::ForgeReply,
                    FaultKind::ForgeCheckpoint,
                    FaultKind::ForgeViewChangeReport,
                    FaultKind::ArbitraryBytes}) {
    if (fault_applicable(kind, role)) kinds.push_back(kind);
  }
  return kinds;
}

}  // namespace

FaultScript random_crash_script(const tailor::SystemBlueprint& bp, Rng& rng,
                                uint64_t horizon_ms) {
  FaultScript script;
  if (bp.f == 0) return script;
  if (rng.chance(0.25)) {
    // Machine-level crashes: take down up to f machines per group,
    // exercising the co-location of the deployment groups.
    std::map<std::string, uint32_t> group_sizes;
    for (const auto& m : bp.machines) {
      group_sizes[m.group] = std::max(group_sizes[m.group], m.index + 1);
    }
    for (const auto& [group, size] : group_sizes) {
      uint32_t count = static_cast<uint32_t>(rng.uniform(0, bp.f));
      for (uint32_t index : pick_distinct(rng, count, size)) {
        FaultEntry entry;
        entry.at_ms = fault_time(rng, horizon_ms);
        entry.machine_target = true;
        entry.group = group;
        entry.machine_index = index;
        script.entries.push_back(entry);
      }
    }
  } else {
    for (const auto& cluster : bp.clusters) {
      uint32_t count = static_cast<uint32_t>(rng.uniform(0, bp.f));
      for (uint32_t index : pick_distinct(rng, count, cluster.size)) {
        FaultEntry entry;
        entry.at_ms = fault_time(rng, horizon_ms);
        entry.replica = ReplicaId{cluster.role, index};
        script.entries.push_back(entry);
      }
    }
  }
  return script;
}

FaultScript random_byzantine_script(const tailor::SystemBlueprint& bp,
                                    Rng& rng, uint64_t horizon_ms) {
  FaultScript script;
  if (bp.f == 0) return script;
  for (const auto& cluster : bp.clusters) {
    if (cluster.domain != tailor::FaultDomain::Shell) continue;
    auto kinds = applicable_byzantine_kinds(cluster.role);
    if (kinds.empty()) continue;
    uint32_t count = static_cast<uint32_t>(rng.uniform(0, bp.f));
    if (count == 0 && rng.chance(0.5)) count = 1;
    for (uint32_t index : pick_distinct(rng, count, cluster.size)) {
      FaultEntry entry;
      entry.at_ms = fault_time(rng, horizon_ms);
      entry.replica = ReplicaId{cluster.role, index};
      entry.kind = kinds[rng.uniform(0, kinds.size() - 1)];
      script.entries.push_back(entry);
    }
  }
  return script;
}

CampaignResult run_campaign(const CampaignSpec& spec, uint32_t threads) {
  CampaignResult result;
  result.runs = spec.runs;
  std::vector<uint8_t> safety(spec.runs, 0), liveness(spec.runs, 0);
  std::vector<std::string> failures(spec.runs);
  std::atomic<uint32_t> next{0};
  auto worker = [&]() {
    while (true) {
      uint32_t i = next.fetch_add(1);
      if (i >= spec.runs) return;
      uint64_t seed = spec.base_seed + i;
      RunConfig config;
      config.blueprint = spec.blueprint;
      config.workload = spec.workload;
      config.seed = seed;
      config.horizon_ms = spec.horizon_ms;
      Rng script_rng = Rng(seed).fork(0xfa17);
      config.faults = spec.kind == CampaignKind::CrashOnly
                          ? random_crash_script(spec.blueprint, script_rng,
                                                spec.horizon_ms)
                          : random_byzantine_script(spec.blueprint, script_rng,
                                                    spec.horizon_ms);
      auto run = run_simulation(config);
      auto safe = check_safety(run.trace);
      safety[i] = safe.pass ? 1 : 0;
      if (spec.liveness) {
        auto live = check_liveness(run.trace, spec.settle_ms);
        liveness[i] = live.pass ? 1 : 0;
        if (!live.pass && failures[i].empty()) {
          failures[i] = "seed " + std::to_string(seed) +
                        " liveness: " + live.reasons.front();
        }
      } else {
        liveness[i] = 1;
      }
      if (!safe.pass && failures[i].empty()) {
        failures[i] =
            "seed " + std::to_string(seed) + " safety: " + safe.reasons.front();
      }
    }
  };
  std::vector<std::thread> pool;
  for (uint32_t t = 0; t < std::max(1u, threads); ++t) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) t.join();
  for (uint32_t i = 0; i < spec.runs; ++i) {
    result.safety_pass += safety[i];
    result.liveness_pass += liveness[i];
    if (!failures[i].empty() && result.failures.size() < 5) {
      result.failures.push_back(failures[i]);
    }
  }
  return result;
}

}  // namespace shellft::sim
