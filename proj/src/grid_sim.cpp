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

#include "gridibn/grid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace gridibn::sim {

using nlohmann::json;

std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::PmuWams: return "PMU_WAMS";
    case TrafficClass::ProtectionFlisr: return "PROTECTION_FLISR";
    case TrafficClass::AmiMeter: return "AMI_METER";
    case TrafficClass::InspectionVideo: return "INSPECTION_VIDEO";
  }
  return "?";
}

std::optional<TrafficClass> parse_traffic_class(std::string_view s) {
  for (auto c : {TrafficClass::PmuWams, TrafficClass::ProtectionFlisr, TrafficClass::AmiMeter,
                 TrafficClass::InspectionVideo}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::LinkDegradation: return "link_degradation";
    case FaultKind::FlisrTrigger: return "flisr_trigger";
    case FaultKind::SourceScale: return "source_scale";
  }
  return "?";
}

namespace {

const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(path + "/" + key, "missing");
  return j.at(key);
}

double need_number(const json& j, const std::string& key, const std::string& path) {
  const auto& v = need(j, key, path);
  if (!v.is_number()) throw SchemaError(path + "/" + key, "expected a number");
  return v.get<double>();
}

std::int64_t need_int(const json& j, const std::string& key, const std::string& path) {
  const auto& v = need(j, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "/" + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string need_string(const json& j, const std::string& key, const std::string& path) {
  const auto& v = need(j, key, path);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw SchemaError(path + "/" + key, "expected a non-empty string");
  }
  return v.get<std::string>();
}

double opt_number(const json& j, const std::string& key, double fallback, const std::string& path) {
  return j.contains(key) ? need_number(j, key, path) : fallback;
}

SimParams params_from_json(const json& j, const std::string& path) {
  SimParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  p.window_s = opt_number(j, "window_s", p.window_s, path);
  p.base_jitter_ms = opt_number(j, "base_jitter_ms", p.base_jitter_ms, path);
  p.congestion_threshold = opt_number(j, "congestion_threshold", p.congestion_threshold, path);
  p.congestion_factor_ms = opt_number(j, "congestion_factor_ms", p.congestion_factor_ms, path);
  if (j.contains("flisr_burst_size")) p.flisr_burst_size = need_int(j, "flisr_burst_size", path);
  p.flisr_burst_span_s = opt_number(j, "flisr_burst_span_s", p.flisr_burst_span_s, path);
  if (!(p.window_s > 0)) throw SchemaError(path + "/window_s", "must be positive");
  if (p.base_jitter_ms < 0) throw SchemaError(path + "/base_jitter_ms", "must be non-negative");
  if (p.congestion_factor_ms < 0) throw SchemaError(path + "/congestion_factor_ms", "must be non-negative");
  if (p.flisr_burst_size < 1) throw SchemaError(path + "/flisr_burst_size", "must be at least 1");
  if (p.flisr_burst_span_s < 0) throw SchemaError(path + "/flisr_burst_span_s", "must be non-negative");
  return p;
}

}  // namespace

json to_json(const FaultEvent& f) {
  json j = {{"at", f.at}, {"kind", std::string(to_string(f.kind))}};
  switch (f.kind) {
    case FaultKind::LinkDegradation:
      j["link"] = f.link;
      j["extra_latency_ms"] = f.extra_latency_ms;
      j["loss_prob"] = f.loss_prob;
      break;
    case FaultKind::FlisrTrigger:
      j["source"] = f.source;
      break;
    case FaultKind::SourceScale:
      j["source"] = f.source;
      j["devices"] = f.devices;
      break;
  }
  return j;
}

FaultEvent fault_from_json(const json& j, const std::string& path) {
  FaultEvent f;
  f.at = opt_number(j, "at", 0.0, path);
  if (f.at < 0) throw SchemaError(path + "/at", "must be non-negative");
  const auto kind = need_string(j, "kind", path);
  if (kind == "link_degradation") {
    f.kind = FaultKind::LinkDegradation;
    f.link = need_string(j, "link", path);
    f.extra_latency_ms = opt_number(j, "extra_latency_ms", 0.0, path);
    f.loss_prob = opt_number(j, "loss_prob", 0.0, path);
    if (f.extra_latency_ms < 0) throw SchemaError(path + "/extra_latency_ms", "must be non-negative");
    if (f.loss_prob < 0 || f.loss_prob > 1) throw SchemaError(path + "/loss_prob", "outside [0,1]");
  } else if (kind == "flisr_trigger") {
    f.kind = FaultKind::FlisrTrigger;
    f.source = need_string(j, "source", path);
  } else if (kind == "source_scale") {
    f.kind = FaultKind::SourceScale;
    f.source = need_string(j, "source", path);
    f.devices = need_int(j, "devices", path);
    if (f.devices < 1) throw SchemaError(path + "/devices", "must be at least 1");
  } else {
    throw SchemaError(path + "/kind", "unknown fault kind '" + kind + "'");
  }
  return f;
}

Scenario load_scenario(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw SchemaError("", "expected an object");
  if (doc.value("schema", "") != "gridibn.scenario/1") {
    throw SchemaError("/schema", "expected gridibn.scenario/1");
  }
  Scenario sc;
  sc.name = doc.value("name", "scenario");

  const auto& topo = need(doc, "topology", "");
  if (topo.is_string()) {
    const auto file = base_dir / topo.get<std::string>();
    std::ifstream in(file);
    if (!in) throw SchemaError("/topology", "cannot read " + file.string());
    try {
      sc.topology = json::parse(in);
    } catch (const json::parse_error& e) {
      throw SchemaError("/topology", e.what());
    }
  } else {
    sc.topology = topo;
  }
  const auto infra = mano::topology_from_json(sc.topology);

  sc.duration_s = need_number(doc, "duration_s", "");
  if (!(sc.duration_s > 0)) throw SchemaError("/duration_s", "must be positive");
  const auto seed = need_int(doc, "seed", "");
  if (seed < 0) throw SchemaError("/seed", "must be non-negative");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.params = params_from_json(doc.contains("sim") ? doc.at("sim") : json(), "/sim");

  std::set<std::string> intent_ids;
  std::map<std::string, SimTime> intent_at;
  const auto& intents = need(doc, "intents", "");
  if (!intents.is_array()) throw SchemaError("/intents", "expected an array");
  for (std::size_t i = 0; i < intents.size(); ++i) {
    const auto path = "/intents/" + std::to_string(i);
    ScenarioIntent si;
    si.id = need_string(intents[i], "id", path);
    si.text = need_string(intents[i], "text", path);
    si.at = opt_number(intents[i], "at", 0.0, path);
    const auto who = intents[i].value("stakeholder", "DSO");
    auto sh = parse_stakeholder(who);
    if (!sh) throw SchemaError(path + "/stakeholder", "unknown stakeholder '" + who + "'");
    si.stakeholder = *sh;
    if (si.at < 0 || si.at >= sc.duration_s) throw SchemaError(path + "/at", "outside the run");
    if (!intent_ids.insert(si.id).second) throw SchemaError(path + "/id", "duplicate id");
    intent_at[si.id] = si.at;
    sc.intents.push_back(std::move(si));
  }

  const json classes = doc.contains("traffic_classes") ? doc.at("traffic_classes") : json::object();
  if (!classes.is_object()) throw SchemaError("/traffic_classes", "expected an object");
  for (const auto& [name, _] : classes.items()) {
    if (!parse_traffic_class(name)) throw SchemaError("/traffic_classes/" + name, "unknown class");
  }

  std::map<std::string, TrafficClass> source_class;
  const auto& sources = need(doc, "sources", "");
  if (!sources.is_array()) throw SchemaError("/sources", "expected an array");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto path = "/sources/" + std::to_string(i);
    const auto& s = sources[i];
    TrafficSource src;
    src.id = need_string(s, "id", path);
    const auto cls_name = need_string(s, "class", path);
    auto cls = parse_traffic_class(cls_name);
    if (!cls) throw SchemaError(path + "/class", "unknown class '" + cls_name + "'");
    src.cls = *cls;
    src.attach = need_string(s, "attach", path);
    if (!infra.node(src.attach) && !infra.endpoints.count(src.attach)) {
      throw SchemaError(path + "/attach", "unknown node or endpoint '" + src.attach + "'");
    }
    src.slice = need_string(s, "slice", path);
    if (!intent_ids.count(src.slice)) throw SchemaError(path + "/slice", "no intent '" + src.slice + "'");

    // Per-source values win over the class defaults.
    json merged = classes.contains(cls_name) ? classes.at(cls_name) : json::object();
    for (const auto& [k, v] : s.items()) merged[k] = v;
    src.rate = need_number(merged, "rate", path);
    src.payload_bytes = need_int(merged, "payload_bytes", path);
    src.devices = merged.contains("devices") ? need_int(merged, "devices", path) : 1;
    if (!(src.rate > 0)) throw SchemaError(path + "/rate", "must be positive");
    if (src.payload_bytes < 1) throw SchemaError(path + "/payload_bytes", "must be at least 1");
    if (src.devices < 1) throw SchemaError(path + "/devices", "must be at least 1");
    if (s.contains("start")) {
      src.start = need_number(s, "start", path);
      if (*src.start < intent_at[src.slice] || *src.start >= sc.duration_s) {
        throw SchemaError(path + "/start", "before its intent or outside the run");
      }
    }
    if (source_class.count(src.id)) throw SchemaError(path + "/id", "duplicate id");
    source_class[src.id] = src.cls;
    sc.sources.push_back(std::move(src));
  }

  if (doc.contains("faults")) {
    const auto& faults = doc.at("faults");
    if (!faults.is_array()) throw SchemaError("/faults", "expected an array");
    for (std::size_t i = 0; i < faults.size(); ++i) {
      const auto path = "/faults/" + std::to_string(i);
      auto f = fault_from_json(faults[i], path);
      if (f.at > sc.duration_s) throw SchemaError(path + "/at", "after the end of the run");
      if (f.kind == FaultKind::LinkDegradation && !infra.link(f.link)) {
        throw SchemaError(path + "/link", "unknown link '" + f.link + "'");
      }
      if (f.kind != FaultKind::LinkDegradation) {
        auto it = source_class.find(f.source);
        if (it == source_class.end()) throw SchemaError(path + "/source", "unknown source '" + f.source + "'");
        if (f.kind == FaultKind::FlisrTrigger && it->second != TrafficClass::ProtectionFlisr) {
          throw SchemaError(path + "/source", "not a PROTECTION_FLISR source");
        }
      }
      sc.faults.push_back(f);
    }
    std::stable_sort(sc.faults.begin(), sc.faults.end(),
                     [](const FaultEvent& a, const FaultEvent& b) { return a.at < b.at; });
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError(file.string(), "cannot read file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(file.string(), e.what());
  }
  auto sc = load_scenario(doc, file.parent_path());
  if (!doc.contains("name")) sc.name = file.stem().string();
  return sc;
}

json to_json(const KpiSample& s) {
  return {{"t", s.t},
          {"slice", s.slice},
          {"source", s.source},
          {"latency_ms", s.latency_ms},
          {"delivered", s.delivered},
          {"burst", s.burst}};
}

json to_json(const KpiReport& r) {
  return {{"slice", r.slice},
          {"window_start", r.window_start},
          {"window_end", r.window_end},
          {"sent", r.sent},
          {"delivered", r.delivered},
          {"dropped", r.dropped},
          {"p99_latency_ms", r.p99_latency_ms ? json(*r.p99_latency_ms) : json()},
          {"loss_rate", r.loss_rate},
          {"throughput_mbps", r.throughput_mbps},
          {"availability", r.availability},
          {"deadline_miss_rate", r.deadline_miss_rate ? json(*r.deadline_miss_rate) : json()},
          {"empty", r.empty()}};
}

KpiReport report_from_json(const json& j) {
  KpiReport r;
  r.slice = j.at("slice").get<std::string>();
  r.window_start = j.at("window_start").get<double>();
  r.window_end = j.at("window_end").get<double>();
  r.sent = j.at("sent").get<std::int64_t>();
  r.delivered = j.at("delivered").get<std::int64_t>();
  r.dropped = j.at("dropped").get<std::int64_t>();
  if (!j.at("p99_latency_ms").is_null()) r.p99_latency_ms = j.at("p99_latency_ms").get<double>();
  r.loss_rate = j.at("loss_rate").get<double>();
  r.throughput_mbps = j.at("throughput_mbps").get<double>();
  r.availability = j.at("availability").get<double>();
  if (!j.at("deadline_miss_rate").is_null()) r.deadline_miss_rate = j.at("deadline_miss_rate").get<double>();
  return r;
}

double p99_nearest_rank(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t rank = (99 * n + 99) / 100;  // ceil(0.99 n)
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

namespace {

bool carries_traffic(slice::NsiState s) {
  return s == slice::NsiState::Active || s == slice::NsiState::Updating ||
         s == slice::NsiState::Degraded;
}

}  // namespace

Simulator::Simulator(SimParams params, std::uint64_t seed, const mano::Mano& mano,
                     const slice::SliceOrchestrator& slices, SampleSink sink)
    : params_(params), rng_(seed), mano_(mano), slices_(slices), sink_(std::move(sink)) {}

void Simulator::start_source(const TrafficSource& src, const std::string& nsi_id, SimTime at) {
  if (sources_.count(src.id)) throw Error(ErrorCode::DuplicateId, "source '" + src.id + "' already started");
  const auto* nsi = slices_.find(nsi_id);
  if (!nsi || !carries_traffic(nsi->state)) {
    throw Error(ErrorCode::UnboundSource, "source '" + src.id + "': slice '" + nsi_id + "' is not Active");
  }
  Running r{src, nsi_id, std::max(at, now_), 0, 0};
  auto& slot = sources_.emplace(src.id, std::move(r)).first->second;
  windows_[nsi_id];
  ++sources_epoch_;
  schedule_next(slot);
}

void Simulator::schedule_next(Running& r) {
  const double t = r.anchor + static_cast<double>(r.k) / r.src.offered_rate();
  queue_.push({t, seq_++, r.src.id, false, r.epoch});
}

void Simulator::scale_source(const std::string& source_id, std::int64_t devices) {
  if (devices < 1) throw Error(ErrorCode::SchemaError, "device count must be at least 1");
  auto it = sources_.find(source_id);
  if (it == sources_.end()) throw Error(ErrorCode::UnboundSource, "source '" + source_id + "' not running");
  auto& r = it->second;
  r.src.devices = devices;
  ++r.epoch;  // orphans the pending emission
  r.anchor = now_;
  r.k = 1;
  ++sources_epoch_;
  schedule_next(r);
}

double Simulator::offered_rate(const std::string& source_id) const {
  auto it = sources_.find(source_id);
  if (it == sources_.end()) throw Error(ErrorCode::UnboundSource, "source '" + source_id + "' not running");
  return it->second.src.offered_rate();
}

void Simulator::trigger_flisr(SimTime at, const std::string& source_id) {
  auto it = sources_.find(source_id);
  if (it == sources_.end() || it->second.src.cls != TrafficClass::ProtectionFlisr) {
    throw Error(ErrorCode::UnboundSource, "no running FLISR source '" + source_id + "'");
  }
  const auto* nsi = slices_.find(it->second.nsi);
  if (!nsi || !carries_traffic(nsi->state) || nsi->nest.slice_type != SliceCategory::Urllc) {
    throw Error(ErrorCode::UnboundSource, "FLISR source '" + source_id + "' has no live URLLC slice");
  }
  const auto n = params_.flisr_burst_size;
  const SimTime start = std::max(at, now_);
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = start + params_.flisr_burst_span_s * static_cast<double>(i) / static_cast<double>(n);
    queue_.push({t, seq_++, source_id, true, 0});
  }
}

double Simulator::congestion_util(const slice::NetworkSliceInstance& nsi) {
  if (load_key_mano_ != mano_.version() || load_key_sources_ != sources_epoch_) {
    link_load_kbps_.clear();
    for (const auto& [id, r] : sources_) {
      const auto* other = slices_.find(r.nsi);
      if (!other || !carries_traffic(other->state)) continue;
      for (const auto& l : other->placement.reserved_links()) link_load_kbps_[l] += r.src.offered_mbps() * 1000.0;
    }
    load_key_mano_ = mano_.version();
    load_key_sources_ = sources_epoch_;
  }
  double util = 0.0;
  const auto& infra = mano_.infrastructure();
  for (const auto& l : nsi.placement.reserved_links()) {
    const auto* link = infra.link(l);
    if (!link || link->capacity_kbps <= 0) continue;
    util = std::max(util, link_load_kbps_[l] / static_cast<double>(link->capacity_kbps));
  }
  return util;
}

void Simulator::emit(const Pending& p) {
  auto it = sources_.find(p.source);
  if (it == sources_.end()) return;
  auto& r = it->second;
  if (!p.burst && p.epoch != r.epoch) return;

  const auto* nsi = slices_.find(r.nsi);
  if (!nsi || !carries_traffic(nsi->state)) return;  // slice gone: the source falls silent

  const auto& infra = mano_.infrastructure();
  const double u_drop = unit_uniform(rng_);
  const double u_jitter = unit_uniform(rng_);
  const double util = congestion_util(*nsi);
  const double latency = mano::path_latency(infra, nsi->placement.path, nsi->chain) +
                         params_.base_jitter_ms * u_jitter +
                         std::max(0.0, util - params_.congestion_threshold) * params_.congestion_factor_ms;
  const bool delivered = !(u_drop < mano::path_loss(infra, nsi->placement.path));

  auto& w = windows_[r.nsi];
  ++w.sent;
  if (delivered) {
    ++w.delivered;
    w.bytes += r.src.payload_bytes;
    w.latencies.push_back(latency);
  } else {
    ++w.dropped;
  }
  if (p.burst) {
    ++w.burst_sent;
    if (!delivered || latency > nsi->nest.max_latency_ms) ++w.burst_missed;
  }
  if (sink_) sink_({p.t, r.nsi, r.src.id, latency, delivered, p.burst});

  if (!p.burst) {
    ++r.k;
    schedule_next(r);
  }
}

std::vector<KpiReport> Simulator::close_window(SimTime end) {
  const SimTime start = static_cast<double>(window_idx_) * params_.window_s;
  std::vector<KpiReport> out;
  for (auto it = windows_.begin(); it != windows_.end();) {
    auto& [nsi_id, w] = *it;
    const auto* nsi = slices_.find(nsi_id);
    const bool alive = nsi && carries_traffic(nsi->state);
    if (!alive && w.sent == 0) {
      it = windows_.erase(it);
      continue;
    }
    KpiReport r;
    r.slice = nsi_id;
    r.window_start = start;
    r.window_end = end;
    r.sent = w.sent;
    r.delivered = w.delivered;
    r.dropped = w.dropped;
    if (!w.latencies.empty()) r.p99_latency_ms = p99_nearest_rank(std::move(w.latencies));
    if (w.sent > 0) {
      r.loss_rate = static_cast<double>(w.dropped) / static_cast<double>(w.sent);
      r.availability = static_cast<double>(w.delivered) / static_cast<double>(w.sent);
    }
    r.throughput_mbps = static_cast<double>(w.bytes) * 8e-6 / (end - start);
    if (w.burst_sent > 0) {
      r.deadline_miss_rate = static_cast<double>(w.burst_missed) / static_cast<double>(w.burst_sent);
    }
    out.push_back(std::move(r));
    w = Window{};
    ++it;
  }
  ++window_idx_;
  return out;
}

std::vector<KpiReport> Simulator::advance(SimTime t) {
  std::vector<KpiReport> out;
  for (;;) {
    const SimTime window_end = static_cast<double>(window_idx_ + 1) * params_.window_s;
    const SimTime next = queue_.empty() ? std::numeric_limits<double>::infinity() : queue_.top().t;
    if (window_end <= t && window_end <= next) {
      now_ = std::max(now_, window_end);
      auto reports = close_window(window_end);
      out.insert(out.end(), std::make_move_iterator(reports.begin()),
                 std::make_move_iterator(reports.end()));
      continue;
    }
    if (next < t) {
      const Pending p = queue_.top();
      queue_.pop();
      now_ = std::max(now_, p.t);
      emit(p);
      continue;
    }
    break;
  }
  now_ = std::max(now_, t);
  return out;
}

std::vector<KpiReport> Simulator::flush(SimTime t) {
  auto out = advance(t);
  const SimTime start = static_cast<double>(window_idx_) * params_.window_s;
  if (t <= start) return out;
  bool any = false;
  for (const auto& [_, w] : windows_) any = any || w.sent > 0;
  if (!any) return out;
  auto tail = close_window(t);
  out.insert(out.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
  return out;
}

}  // namespace gridibn::sim
