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

#include "gridibn/service.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace gridibn::api {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& file, const std::string& path) {
  std::ifstream in(file);
  if (!in) throw SchemaError(path, "cannot read " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path, e.what());
  }
}

// A config key holds either an inline document or a relative file name.
json resolve_doc(const json& doc, const std::string& key, const std::filesystem::path& base) {
  const auto& v = doc.at(key);
  if (v.is_string()) return read_json_file(base / v.get<std::string>(), "/" + key);
  return v;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object() || doc.value("schema", "") != "gridibn.config/1") {
    throw SchemaError("/schema", "expected gridibn.config/1");
  }
  for (const char* key : {"requirement_catalog", "gst_catalog"}) {
    if (!doc.contains(key)) throw SchemaError(std::string("/") + key, "missing");
  }
  ServiceConfig c;
  c.requirements = intent::RequirementCatalog::from_json(resolve_doc(doc, "requirement_catalog", base_dir));
  c.gst_catalog = service::gst_catalog_from_json(resolve_doc(doc, "gst_catalog", base_dir));
  if (doc.contains("slas")) {
    const auto slas = resolve_doc(doc, "slas", base_dir);
    if (!slas.contains("slas") || !slas.at("slas").is_array()) throw SchemaError("/slas", "missing array");
    std::size_t i = 0;
    for (const auto& s : slas.at("slas")) c.slas.push_back(sla::sla_from_json(s, "/slas/" + std::to_string(i++)));
  }
  if (doc.contains("topology")) c.topology = resolve_doc(doc, "topology", base_dir);
  if (doc.contains("mano")) c.mano = mano::ManoConfig::from_json(resolve_doc(doc, "mano", base_dir));
  try {
    if (doc.contains("cost_weights")) {
      const auto& w = doc.at("cost_weights");
      c.weights.cpu = w.value("cpu", c.weights.cpu);
      c.weights.bandwidth = w.value("bandwidth", c.weights.bandwidth);
      c.weights.dedicated_surcharge = w.value("dedicated_surcharge", c.weights.dedicated_surcharge);
    }
    if (doc.contains("loop")) {
      const auto& l = doc.at("loop");
      c.loop.k = l.value("k", c.loop.k);
      c.loop.h = l.value("h", c.loop.h);
      c.loop.cooldown = l.value("cooldown", c.loop.cooldown);
    }
    c.time_scale = doc.value("time_scale", c.time_scale);
  } catch (const json::exception& e) {
    throw SchemaError("", e.what());
  }
  if (c.loop.k < 1 || c.loop.h < c.loop.k || c.loop.cooldown < 0) {
    throw SchemaError("/loop", "need 1 <= k <= h and cooldown >= 0");
  }
  if (!(c.time_scale > 0)) throw SchemaError("/time_scale", "must be positive");
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& file) {
  return from_json(read_json_file(file, file.string()), file.parent_path());
}

json to_json(const SubmitResult& r) {
  json j = {{"intent_id", r.intent_id}, {"dry_run", r.dry_run}, {"status", r.ok() ? "ok" : "rejected"}};
  if (r.slice_type) j["slice_type"] = std::string(to_string(*r.slice_type));
  if (!r.profile_id.empty()) j["profile_id"] = r.profile_id;
  if (!r.gst_id.empty()) j["gst_id"] = r.gst_id;
  if (!r.nsi_id.empty()) {
    j["nsi_id"] = r.nsi_id;
    j["status"] = "active";
  }
  if (r.feasibility) {
    j["feasibility"] = {{"feasible", r.feasibility->feasible}, {"reason", r.feasibility->reason}};
  }
  if (r.error) {
    const auto& e = *r.error;
    json err = {{"stage", e.stage}, {"code", std::string(to_string(e.code))}, {"message", e.message}};
    if (e.position) err["position"] = *e.position;
    if (!e.expected.empty()) err["expected"] = e.expected;
    if (!e.violations.empty()) {
      json v = json::array();
      for (const auto& x : e.violations) v.push_back({{"kpi", x.kpi}, {"detail", x.detail}});
      err["violations"] = v;
    }
    j["error"] = err;
  }
  return j;
}

namespace {

json intent_json(const IntentRecord& r) {
  return {{"id", r.id},
          {"stakeholder", std::string(to_string(r.stakeholder))},
          {"text", r.text},
          {"canonical", r.canonical},
          {"submitted_at", r.submitted_at},
          {"profile_id", r.profile_id},
          {"nsi_id", r.nsi_id}};
}

IntentRecord intent_from_json(const json& j) {
  return {j.at("id").get<std::string>(),
          parse_stakeholder(j.at("stakeholder").get<std::string>()).value(),
          j.at("text").get<std::string>(),
          j.at("canonical").get<std::string>(),
          j.at("submitted_at").get<double>(),
          j.at("profile_id").get<std::string>(),
          j.at("nsi_id").get<std::string>()};
}

}  // namespace

Service::Service(ServiceConfig cfg)
    : cfg_(std::move(cfg)),
      mano_(cfg_.mano),
      slices_(
          mano_,
          [this](const slice::LifecycleEvent& e) {
            emit("slice", {{"type", "slice.lifecycle"},
                           {"nsi_id", e.nsi_id},
                           {"from", e.from ? json(std::string(slice::to_string(*e.from))) : json()},
                           {"to", std::string(slice::to_string(e.to))},
                           {"reason", e.reason}});
          },
          [this] { return now_; }) {}

EventRecord Service::emit(const std::string& category, json payload) {
  return log_.append(now_, category, std::move(payload));
}

void Service::bootstrap(bool with_topology) {
  if (with_topology && !cfg_.topology.is_null()) load_topology(cfg_.topology);
  for (const auto& s : cfg_.slas) register_sla(s);
}

void Service::load_topology(const json& doc) {
  mano_.load_topology(mano::topology_from_json(doc));
  emit("mano", {{"type", "topology.loaded"}, {"topology", doc}});
}

void Service::register_sla(const sla::Sla& s) {
  slas_.register_sla(s);
  emit("sla", {{"type", "sla.registered"}, {"sla", sla::to_json(s)}});
}

void Service::invalidate_sla(const std::string& id) {
  slas_.invalidate(id);
  emit("sla", {{"type", "sla.invalidated"}, {"id", id}});
}

SubmitResult Service::submit_intent(Stakeholder who, const std::string& text, bool dry_run) {
  return run_pipeline(who, text, dry_run, std::nullopt);
}

SubmitResult Service::run_pipeline(Stakeholder who, const std::string& text, bool dry_run,
                                   const std::optional<std::string>& forced_id) {
  SubmitResult res;
  res.dry_run = dry_run;
  res.intent_id = forced_id ? *forced_id : "intent-" + std::to_string(next_intent_);
  if (!dry_run) {
    ++next_intent_;
    emit("intent", {{"type", "intent.submitted"},
                    {"intent_id", res.intent_id},
                    {"stakeholder", std::string(to_string(who))},
                    {"text", text}});
  }

  auto fail = [&](StageError e) -> SubmitResult {
    if (!dry_run) {
      json payload = {{"type", "intent.rejected"},
                      {"intent_id", res.intent_id},
                      {"stage", e.stage},
                      {"code", std::string(to_string(e.code))},
                      {"message", e.message}};
      if (e.position) payload["position"] = *e.position;
      emit("intent", std::move(payload));
    }
    res.error = std::move(e);
    return res;
  };
  auto stage_error = [](const std::string& stage, const Error& e) {
    StageError s;
    s.stage = stage;
    s.code = e.code();
    s.message = e.what();
    return s;
  };

  // 1. Parse.
  intent::IntentAst ast;
  try {
    ast = intent::parse_intent(text, who);
  } catch (const SyntaxError& e) {
    auto s = stage_error("parse", e);
    s.position = e.position();
    s.expected = e.expected();
    return fail(std::move(s));
  }
  if (ast.stakeholder != who) {
    return fail({"parse", ErrorCode::ContradictoryClauses,
                 "AS clause names " + std::string(to_string(ast.stakeholder)) +
                     " but the request comes from " + std::string(to_string(who)),
                 std::nullopt, {}, {}});
  }

  // 2. Translate.
  intent::ServiceRequirementSet reqs;
  try {
    reqs = intent::translate(ast, cfg_.requirements, res.intent_id);
  } catch (const Error& e) {
    return fail(stage_error("translate", e));
  }
  if (!dry_run) {
    emit("intent", {{"type", "intent.accepted"},
                    {"intent_id", res.intent_id},
                    {"stakeholder", std::string(to_string(who))},
                    {"canonical", intent::render(ast)},
                    {"requirements", intent::to_json(reqs)}});
  }

  // 3. Cross-validate against the governing SLA.
  try {
    auto v = slas_.validate(reqs, who);
    if (!v.accepted) {
      StageError s{"validate", ErrorCode::SlaRejected, "rejected by SLA " + v.sla_id, std::nullopt, {}, v.reasons};
      return fail(std::move(s));
    }
    if (!dry_run) {
      emit("sla", {{"type", "sla.validated"},
                   {"intent_id", res.intent_id},
                   {"sla_id", v.sla_id},
                   {"category", std::string(to_string(reqs.category))}});
    }
  } catch (const Error& e) {
    return fail(stage_error("validate", e));
  }

  // 4. Service profile.
  service::ServiceOrchestrator scratch = profile_seq_;
  auto& seq = dry_run ? scratch : profile_seq_;
  auto profile = seq.build_service_profile(reqs, who);
  profile.state = service::ProfileState::Validated;
  res.profile_id = profile.id;
  if (!dry_run) emit("profile", {{"type", "profile.created"}, {"profile", service::to_json(profile)}});

  // 5. NEST.
  Nest nest;
  try {
    nest = service::select_nest(profile, cfg_.gst_catalog, cfg_.weights);
  } catch (const Error& e) {
    return fail(stage_error("nest", e));
  }
  res.slice_type = nest.slice_type;
  res.gst_id = nest.gst_id;
  if (!dry_run) {
    emit("profile", {{"type", "nest.selected"},
                     {"intent_id", res.intent_id},
                     {"profile_id", profile.id},
                     {"slice_type", std::string(to_string(nest.slice_type))},
                     {"nest", gridibn::to_json(nest)},
                     {"service_model", service::emit_service_model(profile, nest)}});
  }

  // 6. Feasibility, with one relaxation of dedicated isolation.
  service::FeasibilityVerdict verdict;
  bool relaxed = false;
  try {
    verdict = service::feasibility_check(profile, nest, mano_.vim_snapshot(), mano_.version(), cfg_.mano);
    if (!verdict.feasible && nest.isolation == Isolation::Dedicated) {
      Nest shared = nest;
      shared.isolation = Isolation::Shared;
      auto second = service::feasibility_check(profile, shared, mano_.vim_snapshot(), mano_.version(), cfg_.mano);
      if (second.feasible) {
        nest = shared;
        verdict = second;
        relaxed = true;
      }
    }
  } catch (const Error& e) {
    return fail(stage_error("feasibility", e));
  }
  res.feasibility = verdict;
  if (dry_run) return res;
  if (!verdict.feasible) {
    const auto code = verdict.reason == "resource" ? ErrorCode::ResourceExhausted : ErrorCode::PlacementFailed;
    return fail({"feasibility", code, "infeasible: " + verdict.reason, std::nullopt, {}, {}});
  }
  emit("profile", {{"type", "feasibility.checked"},
                   {"profile_id", profile.id},
                   {"feasible", true},
                   {"relaxed_isolation", relaxed},
                   {"latency_ms", verdict.placement->latency_ms}});

  // 7. Instantiate.
  const auto ends = service::resolve_endpoints(mano_.infrastructure(), reqs.subject, reqs.target);
  const auto nsi_id = slices_.request(nest, ends->first, ends->second).id;
  try {
    slices_.realize(nsi_id);
  } catch (const Error& e) {
    slices_.forget(nsi_id);  // realize() already rolled back and terminated it
    return fail(stage_error("instantiate", e));
  }
  profile.state = service::ProfileState::Provisioned;
  profile.nsi_id = nsi_id;
  profiles_[profile.id] = profile;
  intents_.push_back({res.intent_id, who, text, intent::render(ast), now_, profile.id, nsi_id});
  loops_[nsi_id];
  res.nsi_id = nsi_id;
  emit("profile", {{"type", "profile.provisioned"},
                   {"intent_id", res.intent_id},
                   {"profile_id", profile.id},
                   {"nsi_id", nsi_id}});
  return res;
}

void Service::inject_fault(const sim::FaultEvent& f) {
  if (f.kind == sim::FaultKind::LinkDegradation) {
    if (!mano_.infrastructure().link(f.link)) throw Error(ErrorCode::UnknownLink, "unknown link '" + f.link + "'");
  } else if (!sim_ || !sim_->has_source(f.source)) {
    throw Error(ErrorCode::UnboundSource, "no running source '" + f.source + "'");
  }
  if (f.at > now_) {
    pending_faults_.push_back(f);
    emit("mano", {{"type", "fault.queued"}, {"fault", sim::to_json(f)}});
    return;
  }
  apply_fault_now(f, false);
}

std::vector<sim::FaultEvent> Service::take_due_faults(SimTime t) {
  std::vector<sim::FaultEvent> due;
  auto split = std::stable_partition(pending_faults_.begin(), pending_faults_.end(),
                                     [t](const sim::FaultEvent& f) { return f.at <= t; });
  due.assign(pending_faults_.begin(), split);
  pending_faults_.erase(pending_faults_.begin(), split);
  return due;
}

std::optional<SimTime> Service::next_pending_fault() const {
  std::optional<SimTime> best;
  for (const auto& f : pending_faults_) {
    if (!best || f.at < *best) best = f.at;
  }
  return best;
}

void Service::apply_fault_now(const sim::FaultEvent& f, bool replaying) {
  switch (f.kind) {
    case sim::FaultKind::LinkDegradation:
      mano_.inject_link_degradation(f.link, f.extra_latency_ms, f.loss_prob);
      break;
    case sim::FaultKind::FlisrTrigger:
      if (!replaying) sim_->trigger_flisr(now_, f.source);
      break;
    case sim::FaultKind::SourceScale:
      if (!replaying) sim_->scale_source(f.source, f.devices);
      break;
  }
  auto applied = f;
  applied.at = now_;
  emit("mano", {{"type", "fault.applied"}, {"fault", sim::to_json(applied)}});
}

const service::ServiceProfile* Service::profile_for_slice(const std::string& nsi_id) const {
  for (const auto& [id, p] : profiles_) {
    if (p.nsi_id && *p.nsi_id == nsi_id) return &p;
  }
  return nullptr;
}

void Service::sync_profile_state(const std::string& nsi_id) {
  const auto* nsi = slices_.find(nsi_id);
  if (!nsi) return;
  for (auto& [id, p] : profiles_) {
    if (!p.nsi_id || *p.nsi_id != nsi_id) continue;
    switch (nsi->state) {
      case slice::NsiState::Active: p.state = service::ProfileState::Provisioned; break;
      case slice::NsiState::Degraded: p.state = service::ProfileState::Degraded; break;
      case slice::NsiState::Terminated: p.state = service::ProfileState::Retired; break;
      default: break;
    }
  }
}

void Service::ingest_report(const sim::KpiReport& r) {
  emit("kpi", {{"type", "kpi.report"}, {"report", sim::to_json(r)}});
  reports_[r.slice].push_back(r);
  if (r.empty()) return;

  const auto* profile = profile_for_slice(r.slice);
  const auto* nsi = slices_.find(r.slice);
  if (!profile || !nsi || nsi->state == slice::NsiState::Terminated) return;

  const auto verdict = monitor::evaluate(r, *profile);
  const auto vrec = emit("kpi", {{"type", "kpi.verdict"}, {"verdict", monitor::to_json(verdict)}});
  verdicts_[r.slice].push_back(verdict);

  auto action = monitor::step(loops_[r.slice], {verdict.overall, vrec.seq}, r.slice, cfg_.loop);
  if (action.kind == monitor::ActionKind::None) return;
  if (action.kind == monitor::ActionKind::ReplaceNest) {
    action.nest = monitor::relaxed_nest(*profile, nsi->nest, cfg_.gst_catalog, cfg_.weights);
    if (!action.nest) {
      action.kind = monitor::ActionKind::Alert;
      action.reason = "no-alternative-nest";
    }
  }
  const auto arec = emit("action", {{"type", "action.issued"}, {"action", monitor::to_json(action)}});
  monitor::ApplyContext ctx{slices_, mano_, cfg_.gst_catalog, cfg_.weights, *profile};
  const auto outcome = monitor::apply(action, ctx);
  emit("action", {{"type", "action.outcome"},
                  {"action_seq", arec.seq},
                  {"slice", r.slice},
                  {"outcome", monitor::to_json(outcome)}});
  sync_profile_state(r.slice);
}

void Service::replay(const std::vector<EventRecord>& events) {
  for (const auto& e : events) {
    const auto type = e.type();
    const auto& p = e.payload;
    now_ = e.t;
    if (type == "topology.loaded") {
      load_topology(p.at("topology"));
    } else if (type == "sla.registered") {
      register_sla(sla::sla_from_json(p.at("sla")));
    } else if (type == "sla.invalidated") {
      invalidate_sla(p.at("id").get<std::string>());
    } else if (type == "intent.submitted") {
      run_pipeline(parse_stakeholder(p.at("stakeholder").get<std::string>()).value(),
                   p.at("text").get<std::string>(), false, p.at("intent_id").get<std::string>());
    } else if (type == "fault.applied") {
      apply_fault_now(sim::fault_from_json(p.at("fault")), true);
    } else if (type == "kpi.report") {
      ingest_report(sim::report_from_json(p.at("report")));
    }
  }
}

json Service::snapshot() const {
  json slas = json::array();
  for (const auto& [id, s] : slas_.all()) slas.push_back(sla::to_json(s));
  json profiles = json::array();
  for (const auto& [id, p] : profiles_) profiles.push_back(service::to_json(p));
  json intents = json::array();
  for (const auto& r : intents_) intents.push_back(intent_json(r));
  json mon = json::object();
  std::set<std::string> keys;
  for (const auto& [k, _] : loops_) keys.insert(k);
  for (const auto& [k, _] : reports_) keys.insert(k);
  for (const auto& k : keys) {
    json reports = json::array();
    if (auto it = reports_.find(k); it != reports_.end()) {
      for (const auto& r : it->second) reports.push_back(sim::to_json(r));
    }
    json verdicts = json::array();
    if (auto it = verdicts_.find(k); it != verdicts_.end()) {
      for (const auto& v : it->second) verdicts.push_back(monitor::to_json(v));
    }
    auto lit = loops_.find(k);
    mon[k] = {{"loop", lit == loops_.end() ? json() : monitor::to_json(lit->second)},
              {"reports", reports},
              {"verdicts", verdicts}};
  }
  return {{"schema", kSnapshotSchema},
          {"version", log_.last_seq()},
          {"now", now_},
          {"counters", {{"next_intent", next_intent_}, {"next_profile", profile_seq_.next_sequence()}}},
          {"slas", slas},
          {"mano", mano_.to_json()},
          {"slices", slices_.to_json()},
          {"profiles", profiles},
          {"intents", intents},
          {"monitor", mon}};
}

std::uint64_t Service::restore(const json& snap) {
  if (!snap.is_object() || snap.value("schema", "") != kSnapshotSchema) {
    throw Error(ErrorCode::VersionMismatch, "snapshot schema is not " + std::string(kSnapshotSchema));
  }
  const auto version = snap.at("version").get<std::uint64_t>();
  now_ = snap.at("now").get<double>();
  next_intent_ = snap.at("counters").at("next_intent").get<std::uint64_t>();
  profile_seq_.set_next_sequence(snap.at("counters").at("next_profile").get<std::uint64_t>());
  slas_.clear();
  for (const auto& s : snap.at("slas")) slas_.register_sla(sla::sla_from_json(s));
  mano_.restore(snap.at("mano"));
  slices_.restore(snap.at("slices"));
  profiles_.clear();
  for (const auto& p : snap.at("profiles")) {
    auto prof = service::profile_from_json(p);
    profiles_.emplace(prof.id, std::move(prof));
  }
  intents_.clear();
  for (const auto& r : snap.at("intents")) intents_.push_back(intent_from_json(r));
  reports_.clear();
  verdicts_.clear();
  loops_.clear();
  for (const auto& [k, m] : snap.at("monitor").items()) {
    if (!m.at("loop").is_null()) loops_[k] = monitor::loop_state_from_json(m.at("loop"));
    auto& reps = reports_[k];
    for (const auto& r : m.at("reports")) reps.push_back(sim::report_from_json(r));
    if (reps.empty()) reports_.erase(k);
    for (const auto& v : m.at("verdicts")) verdicts_[k].push_back(monitor::verdict_from_json(v));
  }
  pending_faults_.clear();
  log_.rewind(version);
  return version;
}

json Service::observable_state() const {
  auto s = snapshot();
  s.erase("version");
  s.erase("counters");
  s["mano"].erase("next_instance");
  s["mano"]["infrastructure"].erase("version");
  s["slices"].erase("next_seq");
  return s;
}

json Service::list_intents() const {
  json out = json::array();
  for (const auto& r : intents_) out.push_back(intent_json(r));
  return out;
}

json Service::list_slices() const {
  json out = json::array();
  for (const auto& [id, nsi] : slices_.all()) {
    const auto* profile = profile_for_slice(id);
    json compliance;
    if (auto it = verdicts_.find(id); it != verdicts_.end() && !it->second.empty()) {
      compliance = it->second.back().overall ? "Met" : "Violated";
    }
    out.push_back({{"id", id},
                   {"state", std::string(slice::to_string(nsi.state))},
                   {"slice_type", std::string(to_string(nsi.nest.slice_type))},
                   {"gst_id", nsi.nest.gst_id},
                   {"profile_id", profile ? json(profile->id) : json()},
                   {"intent_id", profile ? json(profile->customer_model_ref) : json()},
                   {"path", nsi.placement.path},
                   {"vnf_nodes", nsi.placement.vnf_nodes},
                   {"compliance", compliance}});
  }
  return out;
}

json Service::get_slice(const std::string& nsi_id) const {
  const auto& nsi = slices_.get(nsi_id);
  json j = slice::to_json(nsi);
  if (const auto* p = profile_for_slice(nsi_id)) j["profile"] = service::to_json(*p);
  if (auto it = verdicts_.find(nsi_id); it != verdicts_.end() && !it->second.empty()) {
    j["compliance"] = monitor::to_json(it->second.back());
  } else {
    j["compliance"] = nullptr;
  }
  if (auto it = loops_.find(nsi_id); it != loops_.end()) j["loop"] = monitor::to_json(it->second);
  return j;
}

json Service::get_kpi(const std::string& nsi_id, SimTime from, SimTime to) const {
  slices_.get(nsi_id);
  json reports = json::array();
  if (auto it = reports_.find(nsi_id); it != reports_.end()) {
    for (const auto& r : it->second) {
      if (r.window_start >= from && r.window_end <= to) reports.push_back(sim::to_json(r));
    }
  }
  json verdicts = json::array();
  if (auto it = verdicts_.find(nsi_id); it != verdicts_.end()) {
    for (const auto& v : it->second) {
      if (v.window_start >= from && v.window_end <= to) verdicts.push_back(monitor::to_json(v));
    }
  }
  return {{"slice", nsi_id}, {"reports", reports}, {"verdicts", verdicts}};
}

std::string Service::check_invariants() const {
  if (auto e = slices_.check_ledger(); !e.empty()) return e;
  for (const auto& [id, nsi] : slices_.all()) {
    if (nsi.state == slice::NsiState::Active && nsi.placement.latency_ms > nsi.nest.max_latency_ms + 1e-9) {
      return "slice " + id + " was placed above its latency bound";
    }
  }
  for (const auto& [id, p] : profiles_) {
    if (p.state == service::ProfileState::Provisioned && (!p.nsi_id || !slices_.find(*p.nsi_id))) {
      return "profile " + id + " is Provisioned without a slice";
    }
  }
  std::uint64_t prev = 0;
  for (const auto& e : log_.all()) {
    if (prev != 0 && e.seq != prev + 1) return "event log gap after " + std::to_string(prev);
    prev = e.seq;
  }
  return {};
}

ScenarioRun::ScenarioRun(Service& svc, sim::Scenario sc, RunOptions opts)
    : svc_(svc),
      sc_(std::move(sc)),
      sim_(sc_.params, opts.seed.value_or(sc_.seed), svc.mano(), svc.slices(), std::move(opts.samples)) {
  svc_.load_topology(sc_.topology);
  svc_.attach_simulator(&sim_);

  std::stable_sort(sc_.intents.begin(), sc_.intents.end(),
                   [](const auto& a, const auto& b) { return a.at < b.at; });
  std::map<std::string, SimTime> intent_at;
  for (const auto& i : sc_.intents) intent_at[i.id] = i.at;
  for (auto& s : sc_.sources) {
    if (!s.start) s.start = intent_at[s.slice];
  }
  std::stable_sort(sc_.sources.begin(), sc_.sources.end(),
                   [](const auto& a, const auto& b) { return *a.start < *b.start; });

  const double w = sc_.params.window_s;
  for (std::uint64_t k = 1; static_cast<double>(k) * w <= sc_.duration_s; ++k) {
    points_.push_back(static_cast<double>(k) * w);
  }
  for (const auto& i : sc_.intents) points_.push_back(i.at);
  for (const auto& s : sc_.sources) points_.push_back(*s.start);
  for (const auto& f : sc_.faults) points_.push_back(f.at);
  points_.push_back(sc_.duration_s);
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

ScenarioRun::~ScenarioRun() { svc_.attach_simulator(nullptr); }

SimTime ScenarioRun::next_time() const {
  SimTime t = points_[next_point_];
  if (auto p = svc_.next_pending_fault(); p && *p < t) t = std::max(*p, svc_.now());
  return t;
}

void ScenarioRun::step() {
  if (done_) return;
  const SimTime t = next_time();
  svc_.set_now(t);

  const bool last = t >= sc_.duration_s;
  for (const auto& r : last ? sim_.flush(t) : sim_.advance(t)) {
    if (r.sent != r.delivered + r.dropped) problems_.push_back("report for " + r.slice + " loses messages");
    svc_.ingest_report(r);
  }

  auto apply = [&](const sim::FaultEvent& f) {
    try {
      svc_.inject_fault(f);
    } catch (const Error& e) {
      problems_.push_back(std::string("fault at t=") + std::to_string(t) + ": " + e.what());
    }
  };
  for (const auto& f : sc_.faults) {
    if (f.at == t) apply(f);
  }
  for (const auto& f : svc_.take_due_faults(t)) {
    auto now = f;
    now.at = t;
    apply(now);
  }

  for (const auto& i : sc_.intents) {
    if (i.at != t) continue;
    const auto res = svc_.submit_intent(i.stakeholder, i.text);
    if (res.ok()) bindings_[i.id] = res.nsi_id;
  }
  for (const auto& s : sc_.sources) {
    if (*s.start != t) continue;
    auto it = bindings_.find(s.slice);
    if (it == bindings_.end()) {
      problems_.push_back("source " + s.id + ": intent '" + s.slice + "' has no Active slice");
      continue;
    }
    try {
      sim_.start_source(s, it->second, t);
    } catch (const Error& e) {
      problems_.push_back(e.what());
    }
  }

  if (auto inv = svc_.check_invariants(); !inv.empty()) problems_.push_back(inv);

  while (next_point_ < points_.size() && points_[next_point_] <= t) ++next_point_;
  done_ = last || next_point_ >= points_.size();
}

void ScenarioRun::run() {
  while (!done_) step();
}

}  // namespace gridibn::api
