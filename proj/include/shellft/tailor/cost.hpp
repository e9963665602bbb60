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

#ifndef SHELLFT_TAILOR_COST_HPP_
#define SHELLFT_TAILOR_COST_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shellft/core/rng.hpp"
#include "shellft/tailor/blueprint.hpp"

namespace shellft::tailor {

// a*f + b with exact integer arithmetic.
struct LinExpr {
  int64_t a = 0;
  int64_t b = 0;

  int64_t at(int64_t f) const { return a * f + b; }
  LinExpr operator+(const LinExpr& o) const { return {a + o.a, b + o.b}; }
  bool operator==(const LinExpr&) const = default;

  std::string str() const;
};

struct CostRow {
  ClusterRole role;
  LinExpr size;       // micro replicas as a function of f
  bool diversified;   // Byzantine fault model: counted into the shell total
};

struct CostReport {
  std::string column;          // baseline | hybrid | mirador | minas | ...
  std::vector<CostRow> rows;
  LinExpr total;
  LinExpr diversified;         // shell total
  int percent_at_f1 = 0;       // round(100 * diversified(1) / baseline(1))
  int percent_limit = 0;       // round(100 * diversified.a / baseline.a)
};

// Diversification-cost column for a named preset (baseline, hybrid,
// mirador, minas, sentry, minas-sentry). The baseline/hybrid columns are
// cost-model constructs (all eight base tasks at 2f+1 replicas); the other
// columns are derived symbolically from tailored blueprints.
std::optional<CostReport> cost_analysis(const std::string& preset);

std::string format_cost_report(const CostReport& report);

// Exploit-resilience model: every successful exploit disables one
// uniformly random not-yet-disabled machine (the attacker cannot aim);
// the system fails once any group loses more machines than it tolerates.
struct ExploitModel {
  std::vector<uint32_t> groups;  // machines per group
  uint32_t tolerance = 1;        // per group
};

ExploitModel monolithic_model(uint32_t f);
ExploitModel group_model(const SystemBlueprint& bp);
// One group per cluster over all micro replicas (fully diversified).
ExploitModel full_diversification_model(const SystemBlueprint& bp);

struct Fraction {
  uint64_t num = 0;
  uint64_t den = 1;
  double value() const { return den == 0 ? 0.0 : double(num) / double(den); }
};

// Exact probability of system-wide failure after k successful exploits.
Fraction exploit_failure_exact(const ExploitModel& model, uint32_t k);
// Monte Carlo estimate over `trials` seeded attack sequences.
double exploit_failure_mc(const ExploitModel& model, uint32_t k,
                          uint64_t trials, uint64_t seed);

}  // namespace shellft::tailor

#endif  // SHELLFT_TAILOR_COST_HPP_
