// Copyright 2026 The gridibn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Closed loop: per-window compliance verdicts, a K-of-H hysteresis with an
// escalation ladder (Rehome, ReplaceNest, Alert) and cooldown, and the
// application of actions through the orchestrators.

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridibn/grid_sim.hpp"
#include "gridibn/nest.hpp"
#include "gridibn/service_orchestrator.hpp"
#include "gridibn/slice_orchestrator.hpp"
#include "json.hpp"

namespace gridibn::monitor {

struct KpiStatus {
  std::string kpi;  // latency, availability, throughput
  bool met = true;
  double observed = 0.0;
  double bound = 0.0;
  friend bool operator==(const KpiStatus&, const KpiStatus&) = default;
};

struct ComplianceVerdict {
  std::string slice;
  SimTime window_start = 0.0;
  SimTime window_end = 0.0;
  std::vector<KpiStatus> statuses;
  bool overall = true;
  friend bool operator==(const ComplianceVerdict&, const ComplianceVerdict&) = default;
};

nlohmann::json to_json(const ComplianceVerdict& v);
ComplianceVerdict verdict_from_json(const nlohmann::json& j);

/// Latency p99 against the bound, availability against reliability, and for
/// eMBB throughput against 95% of the requested bandwidth. A window where
/// nothing was delivered counts as an unbounded p99. Throws EmptyWindow.
ComplianceVerdict evaluate(const sim::KpiReport& report, const service::ServiceProfile& profile);

struct LoopPolicy {
  int k = 2;         // violated windows needed
  int h = 3;         // out of the last h
  int cooldown = 3;  // windows without actions after one
};

enum class ActionKind { None, Rehome, ReplaceNest, Alert };

std::string_view to_string(ActionKind k);

struct AdaptationAction {
  ActionKind kind = ActionKind::None;
  std::string slice;
  std::optional<Nest> nest;  // ReplaceNest only
  std::string reason;        // Alert only
  /// Event-log sequence numbers of the violating verdicts behind the action.
  std::vector<std::uint64_t> triggers;
};

nlohmann::json to_json(const AdaptationAction& a);

/// Stateless hysteresis over a verdict history: Rehome when at least K of the
/// last H verdicts are violations, None otherwise.
AdaptationAction decide(const std::vector<ComplianceVerdict>& history, const LoopPolicy& policy = {});

struct HistoryEntry {
  bool met = true;
  std::uint64_t verdict_seq = 0;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Per-slice loop memory. The ladder level drops back to Rehome after H
/// consecutive compliant windows.
struct LoopState {
  std::deque<HistoryEntry> history;
  int cooldown = 0;
  int level = 0;
  int consecutive_met = 0;
  friend bool operator==(const LoopState&, const LoopState&) = default;
};

nlohmann::json to_json(const LoopState& s);
LoopState loop_state_from_json(const nlohmann::json& j);

/// Feeds one verdict into the loop. Non-None results carry the triggering
/// verdict sequence numbers; the history is cleared and the cooldown armed.
AdaptationAction step(LoopState& state, const HistoryEntry& latest, const std::string& slice,
                      const LoopPolicy& policy = {});

/// Links of the slice's current walk that carry injected latency or loss;
/// all of its links when none do.
std::set<std::string> degraded_links(const slice::NetworkSliceInstance& nsi,
                                     const mano::Infrastructure& infra);

/// Re-selection for ReplaceNest: double the bandwidth tier first, then relax
/// isolation to shared. nullopt when neither yields a different NEST.
std::optional<Nest> relaxed_nest(const service::ServiceProfile& profile, const Nest& current,
                                 const std::vector<service::GstTemplate>& catalog,
                                 const service::CostWeights& weights = {});

struct ApplyContext {
  slice::SliceOrchestrator& slices;
  const mano::Mano& mano;
  const std::vector<service::GstTemplate>& catalog;
  service::CostWeights weights;
  const service::ServiceProfile& profile;
};

struct Outcome {
  ActionKind requested = ActionKind::None;
  /// What actually happened: the requested kind, or Alert on failure.
  ActionKind executed = ActionKind::None;
  bool changed = false;
  std::string detail;
  std::vector<std::string> new_path;
};

nlohmann::json to_json(const Outcome& o);

/// Marks the slice Degraded, then runs the action. Orchestrator errors turn
/// into an Alert outcome; nothing is thrown for them.
Outcome apply(const AdaptationAction& action, ApplyContext& ctx);

}  // namespace gridibn::monitor
