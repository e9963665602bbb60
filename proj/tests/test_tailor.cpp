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

#include <set>

#include "shellft/tailor/cost.hpp"
#include "shellft/tailor/tailor.hpp"

using namespace shellft;
using namespace shellft::tailor;

namespace {

SystemBlueprint must_configure(const std::string& shell, uint32_t f) {
  std::string error;
  auto selection = parse_shell_selection(shell, &error);
  REQUIRE_MESSAGE(selection.has_value(), error);
  auto bp = configure(*selection, f, &error);
  REQUIRE_MESSAGE(bp.has_value(), error);
  return *bp;
}

// Independent classification oracle: one-step reachability over the edge
// list, computed without the production classify().
std::map<ClusterRole, FaultDomain> classify_oracle(const SystemBlueprint& bp) {
  std::map<ClusterRole, FaultDomain> domains;
  for (const auto& c : bp.clusters) {
    if (bp.shell.count(c.role)) {
      domains[c.role] = FaultDomain::Shell;
      continue;
    }
    bool shell_input = false;
    for (const auto& e : bp.edges) {
      if (e.consumer == c.role && bp.shell.count(e.producer)) {
        shell_input = true;
      }
    }
    domains[c.role] = shell_input ? FaultDomain::Filter : FaultDomain::Core;
  }
  return domains;
}

}  // namespace

TEST_CASE("adapt: minas selection") {
  auto bp = must_configure("minas", 1);
  CHECK(bp.size_of(ClusterRole::Executor) == 4);   // 3f+1
  CHECK(bp.size_of(ClusterRole::FrontEnd) == 3);   // unchanged
  CHECK(bp.size_of(ClusterRole::Preparer) == 0);   // no new clusters
  CHECK(bp.size_of(ClusterRole::Curator) == 0);
  CHECK(bp.thresholds.reply == 2);                 // client quorum f+1
  CHECK(bp.thresholds.checkpoint == 2);
  CHECK(bp.thresholds.ts_completion == 3);         // 2f+1 from shell sources
  CHECK(bp.thresholds.commit == 2);                // committers unchanged
  CHECK_FALSE(bp.thresholds.commit_match);
  CHECK(bp.vc_mode == ViewChangeMode::Base);
}

TEST_CASE("adapt: sentry installs the agreement stage") {
  auto bp = must_configure("sentry", 1);
  CHECK(bp.size_of(ClusterRole::Preparer) == 4);     // 3f+1
  CHECK(bp.size_of(ClusterRole::Conservator) == 3);  // 2f+1
  CHECK(bp.size_of(ClusterRole::Curator) == 2);      // f+1
  CHECK(bp.size_of(ClusterRole::Auditor) == 4);      // 3f+1
  CHECK(bp.size_of(ClusterRole::RecordKeeper) == 3); // 2f+1
  CHECK(bp.size_of(ClusterRole::Proposer) == 2);     // f+1, no size update
  CHECK(bp.shell.count(ClusterRole::Curator) == 1);  // curator joins the shell
  CHECK(bp.vc_mode == ViewChangeMode::CuratorPipeline);
  CHECK(bp.thresholds.prepare_opinion == 3);         // 2f+1 matching opinions
  CHECK(bp.thresholds.voucher == 3);
}

TEST_CASE("adapt: empty shell leaves the base protocol unchanged") {
  auto bp = must_configure("base", 1);
  CHECK(bp.shell.empty());
  CHECK(bp.size_of(ClusterRole::Proposer) == 2);  // f+1
  for (auto role : {ClusterRole::FrontEnd, ClusterRole::Committer,
                    ClusterRole::Executor, ClusterRole::Controller,
                    ClusterRole::AgreementMonitor,
                    ClusterRole::CompletionMonitor, ClusterRole::ViewMonitor}) {
    CHECK(bp.size_of(role) == 3);  // 2f+1
  }
  CHECK(bp.thresholds.reply == 1);
  CHECK(bp.thresholds.checkpoint == 1);
  CHECK(bp.total_replicas() == 23);  // 15f+8 at f=1 (proposer cluster is f+1)
}

TEST_CASE("adapt: committer shell installs the adapted proposer") {
  auto bp = must_configure("committer", 1);
  CHECK(bp.vc_mode == ViewChangeMode::AdaptedProposer);
  CHECK(bp.size_of(ClusterRole::Committer) == 4);  // 3f+1
  CHECK(bp.thresholds.commit == 3);                // 2f+1
  CHECK(bp.thresholds.commit_match);               // digest matching
  CHECK(bp.thresholds.vc_reports == 3);            // 2f+1 slot reports
  CHECK(bp.thresholds.vc_support == 2);            // f+1 matching claims
  CHECK(bp.thresholds.reply == 1);                 // executors stay crash-only
}

TEST_CASE("adapt: unknown role is rejected") {
  std::string error;
  auto selection = parse_shell_selection("front_end,nonsense", &error);
  CHECK_FALSE(selection.has_value());
  CHECK(error.find("nonsense") != std::string::npos);
}

TEST_CASE("classify: minas domains match the oracle") {
  auto bp = must_configure("minas", 1);
  auto oracle = classify_oracle(bp);
  for (const auto& c : bp.clusters) {
    CHECK(c.domain == oracle[c.role]);
  }
  CHECK(bp.domain_of(ClusterRole::Proposer) == FaultDomain::Filter);
  CHECK(bp.domain_of(ClusterRole::CompletionMonitor) == FaultDomain::Filter);
  CHECK(bp.domain_of(ClusterRole::ViewMonitor) == FaultDomain::Core);
  CHECK(bp.domain_of(ClusterRole::Controller) == FaultDomain::Filter);
  CHECK(bp.domain_of(ClusterRole::Committer) == FaultDomain::Core);
}

TEST_CASE("classify: sentry domains match the oracle") {
  auto bp = must_configure("sentry", 1);
  auto oracle = classify_oracle(bp);
  for (const auto& c : bp.clusters) {
    CHECK(c.domain == oracle[c.role]);
  }
  CHECK(bp.domain_of(ClusterRole::Preparer) == FaultDomain::Filter);
  CHECK(bp.domain_of(ClusterRole::Auditor) == FaultDomain::Filter);
  CHECK(bp.domain_of(ClusterRole::CompletionMonitor) == FaultDomain::Filter);
}

TEST_CASE("classify: empty shell puts everything in the core") {
  auto bp = must_configure("base", 1);
  for (const auto& c : bp.clusters) {
    CHECK(c.domain == FaultDomain::Core);
  }
}

TEST_CASE("configure: minas deployment groups (4 + 3 machines)") {
  auto bp = must_configure("minas", 1);
  uint32_t shell_machines = 0, fc_machines = 0;
  for (const auto& m : bp.machines) {
    if (m.group == "shell") shell_machines = std::max(shell_machines, m.index + 1);
    else fc_machines = std::max(fc_machines, m.index + 1);
  }
  CHECK(shell_machines == 4);
  CHECK(fc_machines == 3);
  CHECK(validate_blueprint(bp).empty());
}

TEST_CASE("configure: f=0 degenerates to singleton clusters") {
  auto bp = must_configure("sentry", 0);
  for (const auto& c : bp.clusters) {
    CHECK(c.size == 1);
  }
  CHECK(bp.thresholds.commit == 1);
  CHECK(bp.thresholds.prepare_opinion == 1);
  CHECK(bp.thresholds.reply == 1);
  auto problems = validate_blueprint(bp);
  for (const auto& p : problems) INFO(p);
  CHECK(problems.empty());
}

TEST_CASE("blueprint serialization round-trips") {
  for (const char* preset : {"base", "minas", "sentry", "minas-sentry",
                             "mirador", "committer"}) {
    auto bp = must_configure(preset, 1);
    auto text = serialize_blueprint(bp);
    std::string error;
    auto parsed = parse_blueprint(text, &error);
    REQUIRE_MESSAGE(parsed.has_value(), error);
    CHECK(serialize_blueprint(*parsed) == text);
    CHECK(validate_blueprint(*parsed).empty());
  }
}

TEST_CASE("sweep: all 256 shell subsets x f in {0,1,2} are valid") {
  for (uint32_t mask = 0; mask < 256; ++mask) {
    ShellSelection selection;
    for (uint32_t bit = 0; bit < 8; ++bit) {
      if (mask & (1u << bit)) selection.base_roles.insert(kBaseRoles[bit]);
    }
    for (uint32_t f : {0u, 1u, 2u}) {
      auto bp = configure(selection, f);
      REQUIRE(bp.has_value());
      auto problems = validate_blueprint(*bp);
      for (const auto& p : problems) INFO("mask ", mask, " f ", f, ": ", p);
      REQUIRE(problems.empty());
    }
  }
}

TEST_CASE("sweep: classification is monotone in the shell set") {
  // Single-role enlargements compose to every subset pair.
  for (uint32_t mask = 0; mask < 256; ++mask) {
    ShellSelection sel;
    for (uint32_t bit = 0; bit < 8; ++bit) {
      if (mask & (1u << bit)) sel.base_roles.insert(kBaseRoles[bit]);
    }
    auto small = configure(sel, 1);
    REQUIRE(small.has_value());
    for (uint32_t bit = 0; bit < 8; ++bit) {
      if (mask & (1u << bit)) continue;
      ShellSelection bigger = sel;
      bigger.base_roles.insert(kBaseRoles[bit]);
      auto large = configure(bigger, 1);
      REQUIRE(large.has_value());
      for (const auto& c : small->clusters) {
        const auto* after = large->find_cluster(c.role);
        if (after == nullptr) continue;  // cluster set changed
        // never Filter/Shell -> Core
        if (c.domain != FaultDomain::Core) {
          CHECK(after->domain != FaultDomain::Core);
        }
      }
    }
  }
}

TEST_CASE("cost: every complexity-table column symbolically in f") {
  struct Cell {
    ClusterRole role;
    LinExpr size;
    bool dark;
  };
  struct Column {
    const char* name;
    LinExpr total;
    LinExpr shell;
    int pct1;
    int pct_inf;
  };
  const Column columns[] = {
      {"baseline", {16, 8}, {0, 0}, 0, 0},
      {"hybrid", {16, 8}, {16, 8}, 100, 100},
      {"mirador", {33, 13}, {33, 13}, 192, 206},
      {"minas", {16, 8}, {5, 2}, 29, 31},
      {"sentry", {27, 13}, {5, 3}, 33, 31},
      {"minas-sentry", {27, 13}, {7, 4}, 46, 44},
  };
  for (const auto& column : columns) {
    auto report = cost_analysis(column.name);
    REQUIRE_MESSAGE(report.has_value(), column.name);
    CHECK_MESSAGE(report->total == column.total, column.name, " total ",
                  report->total.str());
    CHECK_MESSAGE(report->diversified == column.shell, column.name, " shell ",
                  report->diversified.str());
    CHECK_MESSAGE(report->percent_at_f1 == column.pct1, column.name);
    CHECK_MESSAGE(report->percent_limit == column.pct_inf, column.name);
  }
  // the "base" preset aliases the baseline cost column
  auto base_alias = cost_analysis("base");
  REQUIRE(base_alias.has_value());
  CHECK(base_alias->total == LinExpr{16, 8});
  CHECK(base_alias->diversified == LinExpr{0, 0});
  // spot-check a few cells per column
  auto mirador = cost_analysis("mirador");
  for (const auto& row : mirador->rows) {
    switch (row.role) {
      case ClusterRole::Proposer: CHECK(row.size == LinExpr{1, 1}); break;
      case ClusterRole::Preparer: CHECK(row.size == LinExpr{3, 1}); break;
      case ClusterRole::Committer: CHECK(row.size == LinExpr{3, 1}); break;
      case ClusterRole::Controller: CHECK(row.size == LinExpr{2, 1}); break;
      case ClusterRole::Curator: CHECK(row.size == LinExpr{1, 1}); break;
      default: break;
    }
  }
  auto sentry = cost_analysis("sentry");
  for (const auto& row : sentry->rows) {
    switch (row.role) {
      case ClusterRole::Conservator:
        CHECK(row.size == LinExpr{2, 1});
        CHECK_FALSE(row.diversified);
        break;
      case ClusterRole::Curator:
        CHECK(row.size == LinExpr{1, 1});
        CHECK(row.diversified);
        break;
      case ClusterRole::Executor:
        CHECK(row.size == LinExpr{3, 1});
        CHECK(row.diversified);
        break;
      default: break;
    }
  }
  // linearity holds at f=2 as well: every cluster size equals 2a+b
  for (const char* name : {"mirador", "minas", "sentry", "minas-sentry"}) {
    auto report = cost_analysis(name);
    auto selection = preset_selection(name);
    auto bp2 = configure(*selection, 2);
    REQUIRE(bp2.has_value());
    for (const auto& row : report->rows) {
      CHECK(static_cast<int64_t>(bp2->size_of(row.role)) == row.size.at(2));
    }
  }
}

TEST_CASE("cost: preset shell memberships match the dark cells") {
  auto minas = must_configure("minas", 1);
  CHECK(minas.shell == std::set<ClusterRole>{ClusterRole::FrontEnd,
                                             ClusterRole::Executor});
  auto sentry = must_configure("sentry", 1);
  CHECK(sentry.shell == std::set<ClusterRole>{ClusterRole::Proposer,
                                              ClusterRole::Curator,
                                              ClusterRole::Executor});
  auto both = must_configure("minas-sentry", 1);
  CHECK(both.shell ==
        std::set<ClusterRole>{ClusterRole::FrontEnd, ClusterRole::Proposer,
                              ClusterRole::Curator, ClusterRole::Executor});
}

TEST_CASE("exploit model: monolithic and group-based probabilities") {
  auto mono = monolithic_model(1);
  CHECK(exploit_failure_exact(mono, 1).value() == doctest::Approx(0.0));
  CHECK(exploit_failure_exact(mono, 2).value() == doctest::Approx(1.0));

  auto minas = must_configure("minas", 1);
  auto groups = group_model(minas);
  REQUIRE(groups.groups.size() == 2);
  CHECK(groups.groups[0] == 4);
  CHECK(groups.groups[1] == 3);
  CHECK(exploit_failure_exact(groups, 1).value() == doctest::Approx(0.0));
  auto two = exploit_failure_exact(groups, 2);
  CHECK(two.num == 3);  // 9/21 reduced
  CHECK(two.den == 7);
  CHECK(two.value() == doctest::Approx(9.0 / 21.0));
  CHECK(exploit_failure_exact(groups, 3).value() == doctest::Approx(1.0));

  double mc = exploit_failure_mc(groups, 2, 1000000, 99);
  CHECK(mc == doctest::Approx(9.0 / 21.0).epsilon(0.012));
}

TEST_CASE("exploit model: full diversification is computed, not asserted") {
  auto base = must_configure("base", 1);
  auto model = full_diversification_model(base);
  CHECK(model.groups.size() == base.clusters.size());
  auto p = exploit_failure_exact(model, 2);
  CHECK(p.value() > 0.0);
  CHECK(p.value() < 1.0);
}

TEST_CASE("preset equivalence: explicit selection equals the preset") {
  auto named = must_configure("sentry", 1);
  auto manual = must_configure("proposer,executor", 1);
  // presets carry their name; the tailored structure must be identical
  named.preset.clear();
  manual.preset.clear();
  CHECK(serialize_blueprint(named) == serialize_blueprint(manual));
}
