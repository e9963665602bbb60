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

#ifndef SHELLFT_TAILOR_TAILOR_HPP_
#define SHELLFT_TAILOR_TAILOR_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shellft/tailor/blueprint.hpp"

namespace shellft::tailor {

// A shell selection: the user picks base clusters; presets may addition-
// ally place the tailoring-added clusters in the shell (full-BFT preset).
struct ShellSelection {
  std::set<ClusterRole> base_roles;   // subset of the eight base roles
  bool added_clusters_shell = false;  // conservator/record keeper etc. too
  std::string preset;                 // name when built from a preset
};

// Named presets: base (empty shell), minas, sentry, minas-sentry, mirador.
std::optional<ShellSelection> preset_selection(const std::string& name);

// Parses "front_end,executor" or a preset name.
std::optional<ShellSelection> parse_shell_selection(const std::string& text,
                                                    std::string* error);

struct AdaptedCluster {
  ClusterRole role;
  uint32_t size;
  bool expanded;
  bool in_shell;
};

// Cluster replacements and size updates for a shell selection, including
// the clusters added when the proposer joins the shell.
std::vector<AdaptedCluster> adapt(const ShellSelection& selection, uint32_t f,
                                  std::string* error = nullptr);

// The protocol's interaction graph as implemented; regenerated per
// configuration so classification can never drift from the message flows.
DependencyGraph generate_edges(bool has_preparer, ViewChangeMode vc_mode);

// Shell members stay shell; consumers of >= 1 shell input become filters
// (mixed inputs included); everything else is core.
std::map<ClusterRole, FaultDomain> classify(
    const DependencyGraph& graph, const std::set<ClusterRole>& shell,
    const std::vector<ClusterRole>& clusters);

// Full pipeline: adapt -> edges -> classify -> sizes/thresholds ->
// deployment groups -> diversity labels.
std::optional<SystemBlueprint> configure(const ShellSelection& selection,
                                         uint32_t f,
                                         std::string* error = nullptr);

// Human-readable domain/deployment report for the CLI.
std::string blueprint_report(const SystemBlueprint& bp);

}  // namespace shellft::tailor

#endif  // SHELLFT_TAILOR_TAILOR_HPP_
