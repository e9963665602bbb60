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

#ifndef SHELLFT_APP_WORKLOAD_HPP_
#define SHELLFT_APP_WORKLOAD_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shellft/core/rng.hpp"

namespace shellft::app {

// Zipfian key selection over ranks 1..n with exponent s; sampling walks a
// precomputed CDF, so streams are reproducible for a fixed seed.
class ZipfianGenerator {
 public:
  ZipfianGenerator(uint64_t n, double s);

  uint64_t sample(Rng& rng) const;  // rank in [1, n]
  double probability(uint64_t rank) const;

 private:
  std::vector<double> cdf_;
};

struct WorkloadSpec {
  uint32_t clients = 4;
  double rate = 25.0;          // commands per second per client
  double update_ratio = 0.5;   // update-heavy default, configurable
  uint64_t keys = 1000;
  uint32_t fields = 10;
  uint32_t field_len = 100;    // 10 x 100 B makes the 1 KB default record
  double zipf_s = 0.99;
  uint64_t start_ms = 0;
  uint64_t duration_ms = 10000;
};

// Parses "clients=4,rate=25,ratio=0.5,keys=1000,fields=10,fieldlen=100,
// start=0,duration=10000". Unknown keys are rejected.
std::optional<WorkloadSpec> parse_workload_spec(const std::string& text,
                                                const WorkloadSpec& defaults);

struct ScheduledCommand {
  uint64_t at_ms = 0;
  std::string payload;
};

// Per-client command schedules; fully determined by (spec, seed).
std::vector<std::vector<ScheduledCommand>> workload_generate(
    const WorkloadSpec& spec, uint64_t seed);

}  // namespace shellft::app

#endif  // SHELLFT_APP_WORKLOAD_HPP_
