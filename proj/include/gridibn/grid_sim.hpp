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

// Discrete-event model of grid communication workloads riding on slices.
// Queueing is a load-threshold approximation, not packet-level queues.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "gridibn/common.hpp"
#include "gridibn/mano.hpp"
#include "gridibn/slice_orchestrator.hpp"
#include "json.hpp"

namespace gridibn::sim {

enum class TrafficClass { PmuWams, ProtectionFlisr, AmiMeter, InspectionVideo };

std::string_view to_string(TrafficClass c);
std::optional<TrafficClass> parse_traffic_class(std::string_view s);

struct TrafficSource {
  std::string id;
  TrafficClass cls = TrafficClass::PmuWams;
  std::string attach;      // node or endpoint id
  double rate = 1.0;       // messages/s per device
  std::int64_t devices = 1;
  std::int64_t payload_bytes = 100;
  std::string slice;       // scenario intent label the source rides on
  std::optional<SimTime> start;

  double offered_rate() const { return rate * static_cast<double>(devices); }
  double offered_mbps() const { return offered_rate() * static_cast<double>(payload_bytes) * 8e-6; }
};

struct SimParams {
  double window_s = 5.0;
  double base_jitter_ms = 1.0;
  double congestion_threshold = 0.8;
  double congestion_factor_ms = 50.0;
  std::int64_t flisr_burst_size = 200;
  double flisr_burst_span_s = 0.05;
};

struct ScenarioIntent {
  std::string id;
  Stakeholder stakeholder = Stakeholder::Dso;
  std::string text;
  SimTime at = 0.0;
};

enum class FaultKind { LinkDegradation, FlisrTrigger, SourceScale };

std::string_view to_string(FaultKind k);

struct FaultEvent {
  SimTime at = 0.0;
  FaultKind kind = FaultKind::LinkDegradation;
  std::string link;
  double extra_latency_ms = 0.0;
  double loss_prob = 0.0;
  std::string source;
  std::int64_t devices = 0;
};

nlohmann::json to_json(const FaultEvent& f);
/// Throws SchemaError.
FaultEvent fault_from_json(const nlohmann::json& j, const std::string& path = "");

struct Scenario {
  std::string name;
  nlohmann::json topology;  // topology document, resolved
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  SimParams params;
  std::vector<ScenarioIntent> intents;
  std::vector<TrafficSource> sources;
  std::vector<FaultEvent> faults;
};

/// Validates a scenario document (schema gridibn.scenario/1). A string
/// "topology" is read relative to base_dir. Throws SchemaError.
Scenario load_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario_file(const std::filesystem::path& file);

struct KpiSample {
  SimTime t = 0.0;
  std::string slice;
  std::string source;
  double latency_ms = 0.0;
  bool delivered = false;
  bool burst = false;
};

nlohmann::json to_json(const KpiSample& s);

struct KpiReport {
  std::string slice;
  SimTime window_start = 0.0;
  SimTime window_end = 0.0;
  std::int64_t sent = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  std::optional<double> p99_latency_ms;  // nullopt when nothing was delivered
  double loss_rate = 0.0;
  double throughput_mbps = 0.0;
  double availability = 0.0;
  std::optional<double> deadline_miss_rate;  // only when a burst hit the window

  bool empty() const { return sent == 0; }
  friend bool operator==(const KpiReport&, const KpiReport&) = default;
};

nlohmann::json to_json(const KpiReport& r);
KpiReport report_from_json(const nlohmann::json& j);

/// Nearest-rank 99th percentile. Empty input is a caller error.
double p99_nearest_rank(std::vector<double> values);

/// Uniform [0,1) from the top 53 bits; portable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

using SampleSink = std::function<void(const KpiSample&)>;

/// Single-threaded event-driven core. Reads placements and link state live
/// from the slice table and MANO, so faults and re-homing take effect on the
/// next message.
class Simulator {
 public:
  Simulator(SimParams params, std::uint64_t seed, const mano::Mano& mano,
            const slice::SliceOrchestrator& slices, SampleSink sink = {});

  /// Starts emitting at `at`. Throws UnboundSource unless the NSI carries
  /// traffic (Active, Updating or Degraded), DuplicateId if already started.
  void start_source(const TrafficSource& src, const std::string& nsi_id, SimTime at);

  /// Processes messages strictly before t and closes every window ending at
  /// or before t; returns the closed windows' reports, one per slice.
  std::vector<KpiReport> advance(SimTime t);

  /// Closes a trailing partial window ending at t, if it saw traffic.
  std::vector<KpiReport> flush(SimTime t);

  /// Burst of protection messages from a started FLISR source whose slice is
  /// URLLC; each message's deadline is the slice's latency bound.
  void trigger_flisr(SimTime at, const std::string& source_id);

  /// Sets a source's device count; per-device rate is unchanged.
  void scale_source(const std::string& source_id, std::int64_t devices);

  double offered_rate(const std::string& source_id) const;
  bool has_source(const std::string& source_id) const { return sources_.count(source_id) != 0; }
  SimTime now() const { return now_; }

 private:
  struct Running {
    TrafficSource src;
    std::string nsi;
    SimTime anchor = 0.0;
    std::uint64_t k = 0;  // emissions since anchor
    std::uint64_t epoch = 0;
  };
  struct Pending {
    SimTime t;
    std::uint64_t seq;
    std::string source;
    bool burst;
    std::uint64_t epoch;
    bool operator>(const Pending& o) const { return t != o.t ? t > o.t : seq > o.seq; }
  };
  struct Window {
    std::int64_t sent = 0, delivered = 0, dropped = 0, bytes = 0;
    std::int64_t burst_sent = 0, burst_missed = 0;
    std::vector<double> latencies;
  };

  void schedule_next(Running& r);
  void emit(const Pending& p);
  double congestion_util(const slice::NetworkSliceInstance& nsi);
  std::vector<KpiReport> close_window(SimTime end);

  SimParams params_;
  std::mt19937_64 rng_;
  const mano::Mano& mano_;
  const slice::SliceOrchestrator& slices_;
  SampleSink sink_;

  std::map<std::string, Running> sources_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  SimTime now_ = 0.0;
  std::uint64_t window_idx_ = 0;
  std::map<std::string, Window> windows_;  // per NSI

  std::uint64_t load_key_mano_ = ~0ULL;
  std::uint64_t load_key_sources_ = 0;
  std::uint64_t sources_epoch_ = 1;
  std::map<std::string, double> link_load_kbps_;
};

}  // namespace gridibn::sim
