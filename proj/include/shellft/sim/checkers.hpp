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

#ifndef SHELLFT_SIM_CHECKERS_HPP_
#define SHELLFT_SIM_CHECKERS_HPP_

#include <string>
#include <vector>

#include "shellft/sim/trace.hpp"

namespace shellft::sim {

struct Verdict {
  bool pass = true;
  std::vector<std::string> reasons;

  void fail(std::string reason) {
    pass = false;
    if (reasons.size() < 20) reasons.push_back(std::move(reason));
  }

  std::string str() const;
};

// Safety: correct executors never commit different commands for the same
// sequence number, executions are gap-free (checkpoint installs may jump
// the frontier), installed checkpoints match one produced by a correct
// executor, and every client-delivered reply equals the reply obtained by
// sequentially re-executing the committed order.
Verdict check_safety(const TraceFile& trace);

// Liveness: every command accepted by a correct front end up to
// (horizon - settle) is executed (or checkpoint-covered) by every correct
// executor by the horizon. The network must be synchronous after gst;
// when gst + settle exceeds the horizon there is nothing to assert.
Verdict check_liveness(const TraceFile& trace, uint64_t settle_ms = 2500,
                       uint64_t gst_ms = 0);

}  // namespace shellft::sim

#endif  // SHELLFT_SIM_CHECKERS_HPP_
