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

#include "shellft/tailor/cost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shellft/tailor/tailor.hpp"

namespace shellft::tailor {

std::string LinExpr::str() const {
  std::ostringstream out;
  if (a == 0 && b == 0) return "0";
  if (a != 0) {
    if (a == 1) out << "f";
    else out << a << "f";
    if (b > 0) out << "+" << b;
    else if (b < 0) out << b;
  } else {
    out << b;
  }
  return out.str();
}

namespace {

// The row order of the complexity table.
constexpr ClusterRole kCostRows[] = {
    ClusterRole::FrontEnd,         ClusterRole::Proposer,
    ClusterRole::Preparer,         ClusterRole::Committer,
    ClusterRole::Executor,         ClusterRole::Controller,
    ClusterRole::ViewMonitor,      ClusterRole::Conservator,
    ClusterRole::Curator,          ClusterRole::Auditor,
    ClusterRole::RecordKeeper,     ClusterRole::AgreementMonitor,
    ClusterRole::CompletionMonitor,
};

constexpr LinExpr kBaselineSize = {2, 1};  // every base task at 2f+1 replicas

int round_percent(int64_t num, int64_t den) {
  // round half up, exact integer arithmetic
  return static_cast<int>((200 * num + den) / (2 * den));
}

bool is_base_task(ClusterRole role) {
  switch (role) {
    case ClusterRole::Preparer:
    case ClusterRole::Conservator:
    case ClusterRole::Curator:
    case ClusterRole::Auditor:
    case ClusterRole::RecordKeeper:
      return false;
    default:
      return true;
  }
}

std::optional<CostReport> table_column(const std::string& preset) {
  CostReport report;
  report.column = preset;
  if (preset == "baseline" || preset == "base" || preset == "hybrid") {
    bool dark = preset == "hybrid";
    for (auto role : kCostRows) {
      if (!is_base_task(role)) {
        report.rows.push_back(CostRow{role, {0, 0}, false});
      } else {
        report.rows.push_back(CostRow{role, kBaselineSize, dark});
      }
    }
    return report;
  }
  auto selection = preset_selection(preset == "minas+sentry" ? "minas-sentry"
                                                             : preset);
  if (!selection) return std::nullopt;
  // Cluster sizes are linear in f: fit through f=0 and f=1, every tailoring
  // rule produces af+b sizes.
  auto bp0 = configure(*selection, 0);
  auto bp1 = configure(*selection, 1);
  if (!bp0 || !bp1) return std::nullopt;
  for (auto role : kCostRows) {
    int64_t s0 = bp0->size_of(role);
    int64_t s1 = bp1->size_of(role);
    LinExpr size{s1 - s0, s0};
    bool dark = bp1->shell.count(role) != 0;
    report.rows.push_back(CostRow{role, size, dark && size != LinExpr{0, 0}});
  }
  return report;
}

}  // namespace

std::optional<CostReport> cost_analysis(const std::string& preset) {
  auto report = table_column(preset);
  if (!report) return std::nullopt;
  for (const auto& row : report->rows) {
    report->total = report->total + row.size;
    if (row.diversified) report->diversified = report->diversified + row.size;
  }
  LinExpr baseline_total;
  for (auto role : kCostRows) {
    if (is_base_task(role)) baseline_total = baseline_total + kBaselineSize;
  }
  report->percent_at_f1 =
      round_percent(report->diversified.at(1), baseline_total.at(1));
  report->percent_limit = round_percent(report->diversified.a, baseline_total.a);
  return report;
}

std::string format_cost_report(const CostReport& report) {
  std::ostringstream out;
  out << "cost column: " << report.column << "\n";
  for (const auto& row : report.rows) {
    if (row.size == LinExpr{0, 0}) continue;
    out << "  " << role_name(row.role) << " " << row.size.str() << " = "
        << row.size.at(1) << (row.diversified ? " [byzantine]" : "") << "\n";
  }
  out << "total " << report.total.str() << " = " << report.total.at(1) << "\n";
  out << "diversified " << report.diversified.str() << " = "
      << report.diversified.at(1) << "\n";
  out << "percentage f=1 " << report.percent_at_f1 << "%\n";
  out << "percentage f->inf " << report.percent_limit << "%\n";
  return out.str();
}

ExploitModel monolithic_model(uint32_t f) {
  return ExploitModel{{2 * f + 1}, f};
}

ExploitModel group_model(const SystemBlueprint& bp) {
  uint32_t shell = 0, filtercore = 0;
  for (const auto& m : bp.machines) {
    if (m.group == "shell") shell = std::max(shell, m.index + 1);
    else filtercore = std::max(filtercore, m.index + 1);
  }
  ExploitModel model;
  if (shell > 0) model.groups.push_back(shell);
  if (filtercore > 0) model.groups.push_back(filtercore);
  model.tolerance = bp.f;
  return model;
}

ExploitModel full_diversification_model(const SystemBlueprint& bp) {
  ExploitModel model;
  for (const auto& c : bp.clusters) model.groups.push_back(c.size);
  model.tolerance = bp.f;
  return model;
}

namespace {

uint64_t binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  uint64_t result = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

uint64_t gcd64(uint64_t a, uint64_t b) {
  while (b) {
    uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Fraction exploit_failure_exact(const ExploitModel& model, uint32_t k) {
  uint64_t total = 0;
  for (auto g : model.groups) total += g;
  if (k > total) k = static_cast<uint32_t>(total);
  // Count k-subsets where every group loses at most `tolerance` machines.
  std::vector<uint64_t> surviving(k + 1, 0);
  surviving[0] = 1;
  for (auto g : model.groups) {
    std::vector<uint64_t> next(k + 1, 0);
    for (uint32_t taken = 0; taken <= model.tolerance && taken <= g; ++taken) {
      uint64_t ways = binomial(g, taken);
      for (uint32_t have = 0; have + taken <= k; ++have) {
        if (surviving[have] == 0) continue;
        next[have + taken] += surviving[have] * ways;
      }
    }
    surviving = std::move(next);
  }
  uint64_t den = binomial(total, k);
  uint64_t ok = surviving[k];
  Fraction fail{den - ok, den};
  uint64_t g = gcd64(fail.num == 0 ? fail.den : fail.num, fail.den);
  if (g > 1) {
    fail.num /= g;
    fail.den /= g;
  }
  return fail;
}

double exploit_failure_mc(const ExploitModel& model, uint32_t k,
                          uint64_t trials, uint64_t seed) {
  std::vector<uint32_t> owner;  // machine -> group
  for (uint32_t g = 0; g < model.groups.size(); ++g) {
    for (uint32_t i = 0; i < model.groups[g]; ++i) owner.push_back(g);
  }
  Rng rng(seed);
  uint64_t failures = 0;
  std::vector<uint32_t> disabled(model.groups.size());
  std::vector<uint32_t> pool(owner.size());
  for (uint64_t t = 0; t < trials; ++t) {
    std::fill(disabled.begin(), disabled.end(), 0);
    for (uint32_t i = 0; i < pool.size(); ++i) pool[i] = i;
    uint32_t remaining = static_cast<uint32_t>(pool.size());
    bool failed = false;
    for (uint32_t e = 0; e < k && remaining > 0; ++e) {
      uint32_t pick = static_cast<uint32_t>(rng.uniform(0, remaining - 1));
      uint32_t machine = pool[pick];
      pool[pick] = pool[--remaining];
      if (++disabled[owner[machine]] > model.tolerance) {
        failed = true;
        break;
      }
    }
    if (failed) ++failures;
  }
  return trials == 0 ? 0.0 : static_cast<double>(failures) / double(trials);
}

}  // namespace shellft::tailor
