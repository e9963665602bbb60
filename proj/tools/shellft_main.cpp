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

// shellft: tailor hybrid replication protocols, simulate them under
// fault injection, and check the recorded traces.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shellft/patterns/patterns.hpp"
#include "shellft/sim/campaign.hpp"
#include "shellft/sim/checkers.hpp"
#include "shellft/sim/sim.hpp"
#include "shellft/tailor/cost.hpp"
#include "shellft/tailor/tailor.hpp"

namespace {

using namespace shellft;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

int cmd_tailor(const std::string& shell, uint32_t f, const std::string& out) {
  std::string error;
  auto selection = tailor::parse_shell_selection(shell, &error);
  if (!selection) {
    std::cerr << "error: " << error << "\n";
    return 2;
  }
  auto bp = tailor::configure(*selection, f, &error);
  if (!bp) {
    std::cerr << "error: " << error << "\n";
    return 2;
  }
  auto problems = tailor::validate_blueprint(*bp);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "invalid blueprint: " << p << "\n";
    return 2;
  }
  std::cout << tailor::blueprint_report(*bp);
  if (!out.empty()) {
    if (!write_file(out, tailor::serialize_blueprint(*bp))) {
      std::cerr << "error: cannot write " << out << "\n";
      return 2;
    }
    std::cout << "blueprint written to " << out << "\n";
  }
  return 0;
}

int cmd_run(const std::string& blueprint_path, uint64_t seed, uint64_t horizon,
            const std::string& fault_path, const std::string& workload_spec,
            const std::string& out_dir, bool deliveries) {
  std::string text, error;
  if (!read_file(blueprint_path, text)) {
    std::cerr << "error: cannot read " << blueprint_path << "\n";
    return 2;
  }
  auto bp = tailor::parse_blueprint(text, &error);
  if (!bp) {
    std::cerr << "error: " << error << "\n";
    return 2;
  }
  sim::RunConfig config;
  config.blueprint = *bp;
  config.seed = seed;
  config.horizon_ms = horizon;
  config.record_deliveries = deliveries;
  app::WorkloadSpec defaults;
  defaults.duration_ms = horizon > 3000 ? horizon - 3000 : horizon / 2;
  auto workload = app::parse_workload_spec(workload_spec, defaults);
  if (!workload) {
    std::cerr << "error: bad workload spec\n";
    return 2;
  }
  config.workload = *workload;
  if (!fault_path.empty()) {
    std::string script_text;
    if (!read_file(fault_path, script_text)) {
      std::cerr << "error: cannot read " << fault_path << "\n";
      return 2;
    }
    auto script = sim::parse_fault_script(script_text, &error);
    if (!script) {
      std::cerr << "error: " << error << "\n";
      return 2;
    }
    auto problems = sim::validate_fault_script(*script, *bp);
    if (!problems.empty()) {
      for (const auto& p : problems) std::cerr << "fault script: " << p << "\n";
      return 2;
    }
    config.faults = *script;
    if (!sim::fault_script_within_model(config.faults, *bp)) {
      std::cout << "note: fault script exceeds the fault model (> f per "
                   "cluster or group)\n";
    }
  }
  auto result = sim::run_simulation(config);
  std::filesystem::create_directories(out_dir);
  std::string trace_path = out_dir + "/trace.txt";
  std::string metrics_path = out_dir + "/metrics.txt";
  if (!write_file(trace_path, result.trace.serialize()) ||
      !write_file(metrics_path, result.metrics.to_text())) {
    std::cerr << "error: cannot write outputs to " << out_dir << "\n";
    return 2;
  }
  std::cout << "committed " << result.metrics.committed << " commands, "
            << result.metrics.delivered << " replies delivered, "
            << result.metrics.max_view << " view changes\n";
  std::cout << "trace: " << trace_path << "\nmetrics: " << metrics_path << "\n";
  return 0;
}

int cmd_check(const std::string& trace_path, uint64_t gst, uint64_t settle) {
  std::string text, error;
  if (!read_file(trace_path, text)) {
    std::cerr << "error: cannot read " << trace_path << "\n";
    return 2;
  }
  auto trace = sim::TraceFile::parse(text, &error);
  if (!trace) {
    std::cerr << "error: " << error << "\n";
    return 2;
  }
  auto safety = sim::check_safety(*trace);
  auto liveness = sim::check_liveness(*trace, settle, gst);
  std::cout << "safety: " << safety.str() << "\n";
  std::cout << "liveness: " << liveness.str() << "\n";
  if (!trace->within_model) {
    std::cout << "note: the fault script exceeded the fault model\n";
  }
  return safety.pass && liveness.pass ? 0 : 1;
}

int cmd_cost(const std::string& preset, uint32_t f, uint64_t trials,
             uint64_t seed) {
  std::vector<std::string> presets;
  if (preset == "all") {
    presets = {"baseline", "hybrid", "mirador", "minas", "sentry",
               "minas-sentry"};
  } else {
    presets = {preset};
  }
  for (const auto& name : presets) {
    auto report = tailor::cost_analysis(name);
    if (!report) {
      std::cerr << "error: unknown preset " << name << "\n";
      return 2;
    }
    std::cout << "=== " << name << " ===\n";
    std::cout << tailor::format_cost_report(*report);
    std::cout << "at f=" << f << ": total " << report->total.at(f)
              << ", diversified " << report->diversified.at(f) << "\n";
  }
  // Exploit-resilience rows: monolithic vs the tailored two-group layout.
  auto mono = tailor::monolithic_model(f);
  std::cout << "=== exploit resilience (f=" << f << ") ===\n";
  auto print_rows = [&](const std::string& label,
                        const tailor::ExploitModel& model, uint32_t upto) {
    std::cout << label << ":";
    for (uint32_t k = 1; k <= upto; ++k) {
      auto exact = tailor::exploit_failure_exact(model, k);
      std::cout << " k=" << k << " " << exact.num << "/" << exact.den << " ("
                << 100.0 * exact.value() << "%)";
      if (trials > 0) {
        double mc = tailor::exploit_failure_mc(model, k, trials, seed + k);
        std::cout << " mc=" << 100.0 * mc << "%";
      }
    }
    std::cout << "\n";
  };
  print_rows("monolithic", mono, 3);
  std::string group_preset = preset;
  if (preset == "all" || preset == "baseline" || preset == "hybrid" ||
      preset == "base" || preset == "mirador") {
    group_preset = "minas";
  }
  auto selection = tailor::preset_selection(group_preset);
  if (selection) {
    auto bp = tailor::configure(*selection, f);
    if (bp) {
      print_rows("group-based (" + selection->preset + ")",
                 tailor::group_model(*bp), 3);
      std::cout << "fully-diversified row (model-dependent, not a "
                   "reproduction target):\n";
      print_rows("  per-cluster tolerance",
                 tailor::full_diversification_model(*bp), 5);
    }
  }
  return 0;
}

int cmd_check_patterns(uint32_t f, uint64_t budget, uint64_t samples,
                       uint64_t seed) {
  using namespace shellft::patterns;
  bool all_pass = true;
  struct Case {
    const char* name;
    PatternInstance inst;
  };
  std::vector<Case> cases = {
      {"RDP/CFT", make_rdp(PatternVariant::CFT, f)},
      {"RDP/BFT", make_rdp(PatternVariant::BFT, f)},
      {"Relay/CFT", make_relay(PatternVariant::CFT, f)},
      {"Relay/BFT", make_relay(PatternVariant::BFT, f)},
  };
  for (const auto& c : cases) {
    PatternCheckReport report =
        f == 1 ? check_pattern_properties(c.inst, budget)
               : sample_pattern_properties(c.inst, samples, seed);
    std::cout << "== " << c.name << " ==\n" << report.str();
    all_pass = all_pass && report.pass;
  }
  if (f == 1) {
    auto control = check_rdp_cft_equivocator(1);
    std::cout << "== RDP/CFT with an (illegal) equivocating source ==\n"
              << control.str();
    std::cout << (control.pass
                      ? "control case: the checker detected the weakness\n"
                      : "control case FAILED: no counterexample found\n");
    all_pass = all_pass && control.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ShellFT: selective hybridization of replicated systems"};
  app.require_subcommand(1);

  std::string shell = "base";
  uint32_t f = 1;
  std::string out_path;
  auto* tailor_cmd = app.add_subcommand(
      "tailor", "tailor the base protocol to a shell selection");
  tailor_cmd->add_option("--shell", shell,
                         "comma-separated base clusters or a preset name");
  tailor_cmd->add_option("-f", f, "per-cluster fault threshold");
  tailor_cmd->add_option("--out", out_path, "write the blueprint here");

  std::string blueprint_path, fault_path, workload_spec, out_dir = "out";
  uint64_t seed = 1, horizon = 10000;
  bool deliveries = false;
  auto* run_cmd = app.add_subcommand("run", "simulate a tailored system");
  run_cmd->add_option("--blueprint", blueprint_path, "blueprint file")
      ->required();
  run_cmd->add_option("--seed", seed, "simulation seed");
  run_cmd->add_option("--horizon", horizon, "simulated milliseconds");
  run_cmd->add_option("--fault", fault_path, "fault script file");
  run_cmd->add_option("--workload", workload_spec,
                      "clients=..,rate=..,ratio=..,keys=..,duration=..");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--deliveries", deliveries, "record every delivery");

  std::string trace_path;
  uint64_t gst = 0, settle = 2500;
  auto* check_cmd = app.add_subcommand("check", "run trace checkers");
  check_cmd->add_option("--trace", trace_path, "trace file")->required();
  check_cmd->add_option("--gst", gst, "global stabilization time (ms)");
  check_cmd->add_option("--settle", settle, "liveness settle margin (ms)");

  std::string preset = "all";
  uint64_t trials = 1000000, mc_seed = 2026;
  auto* cost_cmd =
      app.add_subcommand("cost", "diversification cost and exploit resilience");
  cost_cmd->add_option("--preset", preset,
                       "baseline|hybrid|mirador|minas|sentry|minas-sentry|all");
  cost_cmd->add_option("-f", f, "fault threshold");
  cost_cmd->add_option("--trials", trials, "Monte Carlo trials (0: skip)");
  cost_cmd->add_option("--seed", mc_seed, "Monte Carlo seed");

  uint64_t budget = 20000000, samples = 100000;
  auto* patterns_cmd = app.add_subcommand(
      "check-patterns", "pattern property suite (exhaustive at f=1)");
  patterns_cmd->add_option("-f", f, "fault threshold (sampling when f > 1)");
  patterns_cmd->add_option("--budget", budget, "enumeration budget");
  patterns_cmd->add_option("--samples", samples, "samples when f > 1");
  patterns_cmd->add_option("--seed", mc_seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);

  if (tailor_cmd->parsed()) return cmd_tailor(shell, f, out_path);
  if (run_cmd->parsed()) {
    return cmd_run(blueprint_path, seed, horizon, fault_path, workload_spec,
                   out_dir, deliveries);
  }
  if (check_cmd->parsed()) return cmd_check(trace_path, gst, settle);
  if (cost_cmd->parsed()) return cmd_cost(preset, f, trials, mc_seed);
  if (patterns_cmd->parsed()) {
    return cmd_check_patterns(f, budget, samples, mc_seed);
  }
  return 2;
}
