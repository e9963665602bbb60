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

#include "shellft/sim/campaign.hpp"
#include "shellft/sim/checkers.hpp"
#include "shellft/sim/sim.hpp"
#include "shellft/tailor/tailor.hpp"

using namespace shellft;
using namespace shellft::sim;

namespace {

tailor::SystemBlueprint blueprint(const std::string& preset, uint32_t f = 1) {
  auto selection = tailor::parse_shell_selection(preset, nullptr);
  REQUIRE(selection.has_value());
  auto bp = tailor::configure(*selection, f);
  REQUIRE(bp.has_value());
  return *bp;
}

RunConfig config_for(const std::string& preset, uint64_t seed,
                     uint64_t horizon = 4000) {
  RunConfig config;
  config.blueprint = blueprint(preset);
  config.workload.clients = 3;
  config.workload.rate = 30;
  config.workload.keys = 100;
  config.workload.duration_ms = horizon > 2500 ? horizon - 2500 : horizon / 2;
  config.seed = seed;
  config.horizon_ms = horizon;
  return config;
}

uint64_t executed_count(const TraceFile& trace, const ReplicaId& executor) {
  uint64_t frontier = 0;
  for (const auto& rec : trace.records) {
    if (rec.who == executor && rec.kind == TraceKind::Execute) {
      frontier = std::max(frontier, rec.seq + 1);
    }
    if (rec.who == executor && rec.kind == TraceKind::CheckpointInstall) {
      frontier = std::max(frontier, rec.seq);
    }
  }
  return frontier;
}

}  // namespace

TEST_CASE("fault-free run: everything commits, no view changes") {
  for (const char* preset :
       {"base", "minas", "sentry", "minas-sentry", "mirador"}) {
    CAPTURE(preset);
    auto result = run_simulation(config_for(preset, 42));
    CHECK(result.metrics.committed > 0);
    CHECK(result.metrics.delivered > 0);
    CHECK(result.metrics.max_view == 0);
    auto safety = check_safety(result.trace);
    INFO(safety.str());
    CHECK(safety.pass);
    auto liveness = check_liveness(result.trace);
    INFO(liveness.str());
    CHECK(liveness.pass);
  }
}

TEST_CASE("identical inputs produce byte-identical traces") {
  auto a = run_simulation(config_for("sentry", 7));
  auto b = run_simulation(config_for("sentry", 7));
  CHECK(a.trace.serialize() == b.trace.serialize());
  auto c = run_simulation(config_for("sentry", 8));
  CHECK(a.trace.serialize() != c.trace.serialize());
}

TEST_CASE("proposer crash: recovery within one view change") {
  for (const char* preset : {"minas", "sentry", "minas-sentry"}) {
    CAPTURE(preset);
    auto config = config_for(preset, 11, 8000);
    config.workload.duration_ms = 5000;
    std::string error;
    auto script = parse_fault_script("at 2000 crash proposer/0\n", &error);
    REQUIRE_MESSAGE(script.has_value(), error);
    config.faults = *script;
    auto result = run_simulation(config);
    CHECK(result.metrics.max_view >= 1);
    // the outage spans the 1 s timeout plus recovery, well below 2.5 s
    CHECK(result.metrics.longest_commit_gap_ms > 1000);
    CHECK(result.metrics.longest_commit_gap_ms < 2500);
    auto safety = check_safety(result.trace);
    INFO(safety.str());
    CHECK(safety.pass);
    auto liveness = check_liveness(result.trace);
    INFO(liveness.str());
    CHECK(liveness.pass);
  }
}

TEST_CASE("machine crash: co-located replicas fail together") {
  auto config = config_for("minas", 21, 8000);
  config.workload.duration_ms = 5000;
  auto script = parse_fault_script("at 1500 crash machine filtercore/0\n");
  REQUIRE(script.has_value());
  config.faults = *script;
  REQUIRE(fault_script_within_model(config.faults, config.blueprint));
  auto result = run_simulation(config);
  // proposer/0 lives on filtercore/0 in minas: its crash forces a view
  // change; every other hosted replica is down too and the run recovers
  uint32_t crashed = 0;
  for (const auto& r : result.trace.replicas) {
    if (!r.correct) ++crashed;
  }
  CHECK(crashed > 1);
  CHECK(check_safety(result.trace).pass);
  auto liveness = check_liveness(result.trace);
  INFO(liveness.str());
  CHECK(liveness.pass);
}

TEST_CASE("equivocation: base and minas diverge, sentry tolerates it") {
  auto script = parse_fault_script("at 500 byzantine proposer/0 equivocate_proposals\n");
  REQUIRE(script.has_value());
  for (const char* preset : {"base", "minas"}) {
    CAPTURE(preset);
    auto config = config_for(preset, 33, 6000);
    config.workload.duration_ms = 3000;
    config.faults = *script;
    auto result = run_simulation(config);
    auto safety = check_safety(result.trace);
    INFO(safety.str());
    CHECK_FALSE(safety.pass);  // diverging replicas
  }
  for (const char* preset : {"sentry", "minas-sentry"}) {
    CAPTURE(preset);
    auto config = config_for(preset, 33, 8000);
    config.workload.duration_ms = 4500;
    config.faults = *script;
    auto result = run_simulation(config);
    auto safety = check_safety(result.trace);
    INFO(safety.str());
    CHECK(safety.pass);
    CHECK(result.metrics.max_view >= 1);  // tolerated via view change
    // progress resumed after the view change
    uint64_t last_commit = 0;
    for (const auto& rec : result.trace.records) {
      if (rec.kind == TraceKind::Commit) {
        last_commit = std::max(last_commit, rec.time);
      }
    }
    CHECK(last_commit > 2000);
  }
}

TEST_CASE("forged replies: shell clients reject, base clients deliver them") {
  auto script = parse_fault_script("at 0 byzantine executor/0 forge_reply\n");
  REQUIRE(script.has_value());
  {
    auto config = config_for("base", 55, 5000);
    config.workload.duration_ms = 2500;
    config.faults = *script;
    auto result = run_simulation(config);
    auto safety = check_safety(result.trace);
    INFO(safety.str());
    CHECK_FALSE(safety.pass);  // at least one forged reply delivered
  }
  for (const char* preset : {"minas", "sentry", "minas-sentry"}) {
    CAPTURE(preset);
    auto config = config_for(preset, 55, 5000);
    config.workload.duration_ms = 2500;
    config.faults = *script;
    auto result = run_simulation(config);
    auto safety = check_safety(result.trace);
    INFO(safety.str());
    CHECK(safety.pass);
    CHECK(result.metrics.delivered > 0);
  }
}

TEST_CASE("forged checkpoints cannot poison shell executors") {
  // Crash an executor late so the survivors advance, then let it rejoin
  // via state transfer while a Byzantine peer serves forged snapshots.
  auto config = config_for("minas", 77, 9000);
  config.workload.duration_ms = 6000;
  auto script = parse_fault_script(
      "at 0 byzantine executor/1 forge_checkpoint\n");
  REQUIRE(script.has_value());
  config.faults = *script;
  // slow one executor with a partition so it must sync
  NetworkModel::Partition part;
  part.from_ms = 1000;
  part.to_ms = 4000;
  part.side_a = {{"shell", 0}};
  config.network.partitions.push_back(part);
  config.network.gst_ms = 4000;
  auto result = run_simulation(config);
  auto safety = check_safety(result.trace);
  INFO(safety.str());
  CHECK(safety.pass);
  auto liveness = check_liveness(result.trace, 3000);
  INFO(liveness.str());
  CHECK(liveness.pass);
}

TEST_CASE("liveness checker attributes beyond-model failures") {
  // f+1 crashed committers exceed the tolerance: the run cannot finish
  // and the checker must report it rather than mask it.
  auto config = config_for("base", 88, 5000);
  config.workload.duration_ms = 2000;
  auto script = parse_fault_script(
      "at 800 crash committer/0\nat 800 crash committer/1\n");
  REQUIRE(script.has_value());
  config.faults = *script;
  CHECK_FALSE(fault_script_within_model(config.faults, config.blueprint));
  auto result = run_simulation(config);
  CHECK_FALSE(result.trace.within_model);
  auto liveness = check_liveness(result.trace);
  CHECK_FALSE(liveness.pass);
  REQUIRE_FALSE(liveness.reasons.empty());
}

TEST_CASE("executor sync via the completion loop in a live run") {
  // partition one executor machine long enough that the cluster's stable
  // checkpoint moves past it; after healing it must install a checkpoint
  auto config = config_for("base", 99, 9000);
  config.workload.rate = 60;
  config.workload.duration_ms = 6000;
  NetworkModel::Partition part;
  part.from_ms = 500;
  part.to_ms = 4500;
  part.side_a = {{"filtercore", 2}};  // executor/2 and peers on machine 2
  config.network.partitions.push_back(part);
  config.network.gst_ms = 4500;
  auto result = run_simulation(config);
  bool installed = false;
  for (const auto& rec : result.trace.records) {
    installed = installed || (rec.kind == TraceKind::CheckpointInstall &&
                              rec.who == ReplicaId{ClusterRole::Executor, 2});
  }
  CHECK(installed);
  auto safety = check_safety(result.trace);
  INFO(safety.str());
  CHECK(safety.pass);
  CHECK(executed_count(result.trace, ReplicaId{ClusterRole::Executor, 2}) > 0);
  auto liveness = check_liveness(result.trace, 3500);
  INFO(liveness.str());
  CHECK(liveness.pass);
}

TEST_CASE("trace files round-trip through the line codec") {
  auto result = run_simulation(config_for("minas", 3, 3000));
  auto text = result.trace.serialize();
  std::string error;
  auto parsed = TraceFile::parse(text, &error);
  REQUIRE_MESSAGE(parsed.has_value(), error);
  CHECK(parsed->serialize() == text);
  CHECK(parsed->records.size() == result.trace.records.size());
  // checkers agree on the parsed trace
  CHECK(check_safety(*parsed).pass == check_safety(result.trace).pass);
}

TEST_CASE("fault script validation rejects inapplicable pairs") {
  auto bp = blueprint("base");
  auto script = parse_fault_script("at 0 byzantine front_end/0 forge_reply\n");
  REQUIRE(script.has_value());
  auto problems = validate_fault_script(*script, bp);
  REQUIRE_FALSE(problems.empty());
  CHECK(problems[0].find("not applicable") != std::string::npos);
  auto unknown = parse_fault_script("at 0 crash executor/9\n");
  REQUIRE(unknown.has_value());
  CHECK_FALSE(validate_fault_script(*unknown, bp).empty());
}

TEST_CASE("small campaigns pass cleanly") {
  for (const char* preset : {"base", "minas", "sentry"}) {
    CAPTURE(preset);
    CampaignSpec spec;
    spec.blueprint = blueprint(preset);
    spec.kind = CampaignKind::CrashOnly;
    spec.runs = 8;
    spec.base_seed = 1000;
    spec.horizon_ms = 12000;
    spec.workload.clients = 3;
    spec.workload.rate = 25;
    spec.workload.keys = 100;
    spec.workload.duration_ms = 3500;
    auto result = run_campaign(spec, 2);
    for (const auto& failure : result.failures) INFO(failure);
    CHECK(result.safety_pass == spec.runs);
    CHECK(result.liveness_pass == spec.runs);
  }
  for (const char* preset : {"minas", "sentry"}) {
    CAPTURE(preset);
    CampaignSpec spec;
    spec.blueprint = blueprint(preset);
    spec.kind = CampaignKind::ByzantineShell;
    spec.runs = 8;
    spec.base_seed = 2000;
    spec.horizon_ms = 6000;
    spec.workload.clients = 3;
    spec.workload.rate = 25;
    spec.workload.keys = 100;
    spec.workload.duration_ms = 3000;
    spec.liveness = false;
    auto result = run_campaign(spec, 2);
    for (const auto& failure : result.failures) INFO(failure);
    CHECK(result.safety_pass == spec.runs);
  }
}
