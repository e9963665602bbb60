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

#ifndef SHELLFT_SIM_CAMPAIGN_HPP_
#define SHELLFT_SIM_CAMPAIGN_HPP_

#include <string>
#include <vector>

#include "shellft/core/rng.hpp"
#include "shellft/sim/checkers.hpp"
#include "shellft/sim/sim.hpp"

namespace shellft::sim {

enum class CampaignKind : uint8_t { CrashOnly, ByzantineShell };

struct CampaignSpec {
  tailor::SystemBlueprint blueprint;
  CampaignKind kind = CampaignKind::CrashOnly;
  uint32_t runs = 200;
  uint64_t base_seed = 1;
  uint64_t horizon_ms = 6000;
  app::WorkloadSpec workload;
  bool liveness = true;       // crash campaigns assert liveness too
  uint64_t settle_ms = 2500;
};

struct CampaignResult {
  uint32_t runs = 0;
  uint32_t safety_pass = 0;
  uint32_t liveness_pass = 0;
  std::vector<std::string> failures;
};

// Within-model random scripts: at most f faulty replicas per cluster
// (machine crashes count per hosted cluster), Byzantine targets confined
// to the blueprint's shell clusters.
FaultScript random_crash_script(const tailor::SystemBlueprint& bp, Rng& rng,
                                uint64_t horizon_ms);
FaultScript random_byzantine_script(const tailor::SystemBlueprint& bp,
                                    Rng& rng, uint64_t horizon_ms);

CampaignResult run_campaign(const CampaignSpec& spec, uint32_t threads = 2);

}  // namespace shellft::sim

#endif  // SHELLFT_SIM_CAMPAIGN_HPP_
