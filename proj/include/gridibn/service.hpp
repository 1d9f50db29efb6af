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

// The runtime core behind the HTTP API and the CLI: the synchronous intent
// pipeline, fault injection, KPI ingestion through the closed loop, queries,
// snapshots and event-sourced replay.
//
// State changes only through input events (topology.loaded, sla.registered,
// sla.invalidated, intent.submitted, fault.applied, kpi.report). Everything
// else in the log is derived, so replaying the inputs after a snapshot
// regenerates both the state and the derived records.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridibn/event_log.hpp"
#include "gridibn/grid_sim.hpp"
#include "gridibn/intent_dsl.hpp"
#include "gridibn/mano.hpp"
#include "gridibn/monitor_optimizer.hpp"
#include "gridibn/service_orchestrator.hpp"
#include "gridibn/sla_registry.hpp"
#include "gridibn/slice_orchestrator.hpp"
#include "json.hpp"

namespace gridibn::api {

inline constexpr const char* kSnapshotSchema = "gridibn.snapshot/1";

struct ServiceConfig {
  intent::RequirementCatalog requirements;
  std::vector<service::GstTemplate> gst_catalog;
  service::CostWeights weights;
  mano::ManoConfig mano = mano::ManoConfig::defaults();
  monitor::LoopPolicy loop;
  std::vector<sla::Sla> slas;
  nlohmann::json topology;  // null when the config names none
  /// Wall seconds per simulated second in serve mode.
  double time_scale = 1.0;

  /// Schema gridibn.config/1. File-valued keys are read relative to
  /// base_dir. Throws SchemaError.
  static ServiceConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
  static ServiceConfig load(const std::filesystem::path& file);
};

struct StageError {
  std::string stage;  // parse, translate, validate, profile, nest, feasibility, instantiate
  ErrorCode code = ErrorCode::SyntaxError;
  std::string message;
  std::optional<std::size_t> position;
  std::vector<std::string> expected;
  std::vector<sla::Violation> violations;
};

struct SubmitResult {
  std::string intent_id;
  bool dry_run = false;
  std::optional<StageError> error;
  std::optional<SliceCategory> slice_type;
  std::string profile_id;
  std::string gst_id;
  std::string nsi_id;
  std::optional<service::FeasibilityVerdict> feasibility;

  bool ok() const { return !error.has_value(); }
};

nlohmann::json to_json(const SubmitResult& r);

struct IntentRecord {
  std::string id;
  Stakeholder stakeholder = Stakeholder::Dso;
  std::string text;
  std::string canonical;
  SimTime submitted_at = 0.0;
  std::string profile_id;
  std::string nsi_id;
  friend bool operator==(const IntentRecord&, const IntentRecord&) = default;
};

/// Not thread-safe: the HTTP layer serializes writers through its command
/// queue and takes a shared lock for readers. The event log is internally
/// synchronized so long-polls never hold the state lock.
class Service {
 public:
  explicit Service(ServiceConfig cfg);
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Loads the config's topology (when present and requested) and SLAs.
  void bootstrap(bool with_topology = true);

  void load_topology(const nlohmann::json& doc);
  void register_sla(const sla::Sla& s);
  void invalidate_sla(const std::string& id);

  /// parse -> translate -> validate -> profile -> NEST -> feasibility ->
  /// instantiate. A failure leaves observable state untouched. Dry runs stop
  /// after feasibility and log nothing.
  SubmitResult submit_intent(Stakeholder who, const std::string& text, bool dry_run = false);

  /// Applies now or, when f.at lies ahead of the clock, queues it for the
  /// running scenario. Throws UnknownLink or UnboundSource.
  void inject_fault(const sim::FaultEvent& f);
  /// Faults queued at or before t, in arrival order; removes them.
  std::vector<sim::FaultEvent> take_due_faults(SimTime t);
  std::optional<SimTime> next_pending_fault() const;

  /// Logs the report and, when it is non-empty, runs evaluate/decide/apply.
  void ingest_report(const sim::KpiReport& r);

  /// Re-executes the input events of `events` in order.
  void replay(const std::vector<EventRecord>& events);

  nlohmann::json snapshot() const;
  /// Throws VersionMismatch for an unknown schema. Returns the log position.
  std::uint64_t restore(const nlohmann::json& snap);
  /// Snapshot minus sequence counters and version stamps.
  nlohmann::json observable_state() const;

  nlohmann::json list_intents() const;
  nlohmann::json list_slices() const;
  /// Throws UnknownId.
  nlohmann::json get_slice(const std::string& nsi_id) const;
  /// Reports whose window lies in [from, to]. Throws UnknownId.
  nlohmann::json get_kpi(const std::string& nsi_id, SimTime from, SimTime to) const;

  /// Ledger and slice-table consistency; first problem or empty.
  std::string check_invariants() const;

  SimTime now() const { return now_; }
  void set_now(SimTime t) { now_ = t; }

  /// The running scenario's simulator; fault kinds that target traffic
  /// sources need one.
  void attach_simulator(sim::Simulator* s) { sim_ = s; }

  EventLog& log() { return log_; }
  const EventLog& log() const { return log_; }
  const ServiceConfig& config() const { return cfg_; }
  const mano::Mano& mano() const { return mano_; }
  const slice::SliceOrchestrator& slices() const { return slices_; }
  const sla::SlaRegistry& slas() const { return slas_; }
  const std::map<std::string, service::ServiceProfile>& profiles() const { return profiles_; }
  const std::vector<IntentRecord>& intents() const { return intents_; }
  const std::map<std::string, std::vector<sim::KpiReport>>& kpi_reports() const { return reports_; }
  const std::map<std::string, std::vector<monitor::ComplianceVerdict>>& verdicts() const { return verdicts_; }

 private:
  SubmitResult run_pipeline(Stakeholder who, const std::string& text, bool dry_run,
                            const std::optional<std::string>& forced_id);
  void apply_fault_now(const sim::FaultEvent& f, bool replaying);
  EventRecord emit(const std::string& category, nlohmann::json payload);
  void sync_profile_state(const std::string& nsi_id);
  const service::ServiceProfile* profile_for_slice(const std::string& nsi_id) const;

  ServiceConfig cfg_;
  EventLog log_;
  SimTime now_ = 0.0;
  sla::SlaRegistry slas_;
  mano::Mano mano_;
  slice::SliceOrchestrator slices_;
  service::ServiceOrchestrator profile_seq_;
  std::map<std::string, service::ServiceProfile> profiles_;
  std::vector<IntentRecord> intents_;
  std::uint64_t next_intent_ = 1;
  std::map<std::string, std::vector<sim::KpiReport>> reports_;
  std::map<std::string, std::vector<monitor::ComplianceVerdict>> verdicts_;
  std::map<std::string, monitor::LoopState> loops_;
  std::vector<sim::FaultEvent> pending_faults_;
  sim::Simulator* sim_ = nullptr;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario's
  sim::SampleSink samples;
};

/// Drives a scenario against a Service: window boundaries, intents, source
/// starts and faults are the control points. At each one the simulator
/// advances first, closed windows go through the loop, then faults apply,
/// then intents are submitted and their sources started.
class ScenarioRun {
 public:
  ScenarioRun(Service& svc, sim::Scenario sc, RunOptions opts = {});
  ~ScenarioRun();
  ScenarioRun(const ScenarioRun&) = delete;
  ScenarioRun& operator=(const ScenarioRun&) = delete;

  bool done() const { return done_; }
  /// Next control point; meaningless once done.
  SimTime next_time() const;
  void step();
  void run();

  /// Intent label to NSI id for intents that reached Active.
  const std::map<std::string, std::string>& bindings() const { return bindings_; }
  /// Invariant trips and unbound sources seen so far.
  const std::vector<std::string>& problems() const { return problems_; }
  const sim::Scenario& scenario() const { return sc_; }

 private:
  Service& svc_;
  sim::Scenario sc_;
  sim::Simulator sim_;
  std::vector<SimTime> points_;
  std::size_t next_point_ = 0;
  bool done_ = false;
  std::map<std::string, std::string> bindings_;
  std::vector<std::string> problems_;
};

}  // namespace gridibn::api
