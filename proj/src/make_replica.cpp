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

#include "shellft/proto/machines.hpp"

namespace shellft::proto {

std::unique_ptr<Replica> make_replica(const ReplicaId& id,
                                      const SystemView& sys) {
  switch (id.cluster) {
    case ClusterRole::FrontEnd:
      return std::make_unique<FrontEndReplica>(id, sys);
    case ClusterRole::Proposer:
      return std::make_unique<ProposerReplica>(id, sys);
    case ClusterRole::Preparer:
      return std::make_unique<PreparerReplica>(id, sys);
    case ClusterRole::Committer:
      return std::make_unique<CommitterReplica>(id, sys);
    case ClusterRole::Executor:
      return std::make_unique<ExecutorReplica>(id, sys);
    case ClusterRole::Controller:
      return std::make_unique<ControllerReplica>(id, sys);
    case ClusterRole::AgreementMonitor:
    case ClusterRole::CompletionMonitor:
    case ClusterRole::ViewMonitor:
      return std::make_unique<MonitorReplica>(id, sys);
    case ClusterRole::Conservator:
      return std::make_unique<ConservatorReplica>(id, sys);
    case ClusterRole::Curator:
      return std::make_unique<CuratorReplica>(id, sys);
    case ClusterRole::Auditor:
      return std::make_unique<AuditorReplica>(id, sys);
    case ClusterRole::RecordKeeper:
      return std::make_unique<RecordKeeperReplica>(id, sys);
    default:
      return nullptr;
  }
}

}  // namespace shellft::proto
