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

#include "gridibn/service_orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gridibn::service {

using nlohmann::json;

void check_template(const GstTemplate& t, const std::string& path) {
  const auto& l = t.limits;
  if (t.id.empty()) throw SchemaError(path + "/id", "empty template id");
  if (!(t.cpu_units >= 0)) throw SchemaError(path + "/cpu_units", "must be >= 0");
  if (!(t.bandwidth_tier_mbps >= 0)) throw SchemaError(path + "/bandwidth_tier_mbps", "must be >= 0");
  if (!(l.latency_floor_ms > 0) || !std::isfinite(l.latency_floor_ms)) {
    throw SchemaError(path + "/limits/latency_floor_ms", "must be finite and > 0");
  }
  if (!(l.reliability_ceiling >= 0 && l.reliability_ceiling <= 1)) {
    throw SchemaError(path + "/limits/reliability_ceiling", "must lie in [0,1]");
  }
  if (!(l.bandwidth_ceiling_mbps > 0)) {
    throw SchemaError(path + "/limits/bandwidth_ceiling_mbps", "must be > 0");
  }
  if (l.device_density_ceiling < 1) {
    throw SchemaError(path + "/limits/device_density_ceiling", "must be >= 1");
  }
  if (t.bandwidth_tier_mbps > l.bandwidth_ceiling_mbps) {
    throw SchemaError(path + "/bandwidth_tier_mbps", "tier exceeds bandwidth ceiling");
  }
}

std::vector<GstTemplate> gst_catalog_from_json(const json& doc) {
  if (!doc.contains("templates") || !doc["templates"].is_array()) {
    throw SchemaError("/templates", "missing array");
  }
  std::vector<GstTemplate> out;
  std::set<std::string> seen;
  std::size_t i = 0;
  for (const auto& t : doc["templates"]) {
    const std::string path = "/templates/" + std::to_string(i++);
    GstTemplate g;
    try {
      g.id = t.at("id").get<std::string>();
      auto cat = parse_category(t.at("slice_type").get<std::string>());
      if (!cat) throw SchemaError(path + "/slice_type", "unknown slice type");
      g.slice_type = *cat;
      auto iso = parse_isolation(t.value("isolation_level", "shared"));
      if (!iso) throw SchemaError(path + "/isolation_level", "unknown isolation level");
      g.isolation = *iso;
      g.cpu_units = t.at("cpu_units").get<double>();
      g.bandwidth_tier_mbps = t.value("bandwidth_tier_mbps", 0.0);
      const auto& l = t.at("limits");
      g.limits.latency_floor_ms = l.at("latency_floor_ms").get<double>();
      g.limits.reliability_ceiling = l.at("reliability_ceiling").get<double>();
      g.limits.bandwidth_ceiling_mbps = l.at("bandwidth_ceiling_mbps").get<double>();
      g.limits.device_density_ceiling = l.at("device_density_ceiling").get<std::int64_t>();
    } catch (const json::exception& e) {
      throw SchemaError(path, e.what());
    }
    check_template(g, path);
    if (!seen.insert(g.id).second) throw SchemaError(path + "/id", "duplicate template id");
    out.push_back(std::move(g));
  }
  return out;
}

json to_json(const GstTemplate& t) {
  return {{"id", t.id},
          {"slice_type", std::string(gridibn::to_string(t.slice_type))},
          {"isolation_level", std::string(gridibn::to_string(t.isolation))},
          {"cpu_units", t.cpu_units},
          {"bandwidth_tier_mbps", t.bandwidth_tier_mbps},
          {"limits",
           {{"latency_floor_ms", t.limits.latency_floor_ms},
            {"reliability_ceiling", t.limits.reliability_ceiling},
            {"bandwidth_ceiling_mbps", t.limits.bandwidth_ceiling_mbps},
            {"device_density_ceiling", t.limits.device_density_ceiling}}}};
}

double template_cost(const GstTemplate& t, double guaranteed_bandwidth_mbps, const CostWeights& w) {
  const double base = w.cpu * t.cpu_units + w.bandwidth * guaranteed_bandwidth_mbps / 10.0;
  return t.isolation == Isolation::Dedicated ? base * (1.0 + w.dedicated_surcharge) : base;
}

std::string_view to_string(ProfileState s) {
  switch (s) {
    case ProfileState::Draft: return "Draft";
    case ProfileState::Validated: return "Validated";
    case ProfileState::Provisioned: return "Provisioned";
    case ProfileState::Degraded: return "Degraded";
    case ProfileState::Retired: return "Retired";
  }
  return "?";
}

namespace {

std::optional<ProfileState> parse_profile_state(std::string_view s) {
  for (auto st : {ProfileState::Draft, ProfileState::Validated, ProfileState::Provisioned,
                  ProfileState::Degraded, ProfileState::Retired}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

double guaranteed_bandwidth(const GstTemplate& t, const ServiceProfile& p,
                            const SelectionPolicy& policy) {
  return std::max({p.requirements.bandwidth_mbps, t.bandwidth_tier_mbps, policy.min_bandwidth_mbps});
}

}  // namespace

json to_json(const ServiceProfile& p) {
  return {{"id", p.id},
          {"requirements", intent::to_json(p.requirements)},
          {"customer_model_ref", p.customer_model_ref},
          {"stakeholder", std::string(gridibn::to_string(p.stakeholder))},
          {"state", std::string(to_string(p.state))},
          {"nsi_id", p.nsi_id ? json(*p.nsi_id) : json(nullptr)}};
}

ServiceProfile profile_from_json(const json& j) {
  ServiceProfile p;
  p.id = j.at("id").get<std::string>();
  p.requirements = intent::requirements_from_json(j.at("requirements"));
  p.customer_model_ref = j.at("customer_model_ref").get<std::string>();
  p.stakeholder = parse_stakeholder(j.at("stakeholder").get<std::string>()).value();
  p.state = parse_profile_state(j.at("state").get<std::string>()).value();
  if (!j.at("nsi_id").is_null()) p.nsi_id = j["nsi_id"].get<std::string>();
  return p;
}

bool admits(const GstTemplate& t, const ServiceProfile& profile, const SelectionPolicy& policy) {
  const auto& r = profile.requirements;
  if (t.slice_type != r.category) return false;
  if (policy.excluded_templates.contains(t.id)) return false;
  if (policy.isolation && t.isolation != *policy.isolation) return false;
  if (r.latency_bound_ms < t.limits.latency_floor_ms) return false;
  if (r.reliability > t.limits.reliability_ceiling) return false;
  if (guaranteed_bandwidth(t, profile, policy) > t.limits.bandwidth_ceiling_mbps) return false;
  if (r.device_count > t.limits.device_density_ceiling) return false;
  return true;
}

Nest select_nest(const ServiceProfile& profile, const std::vector<GstTemplate>& catalog,
                 const CostWeights& weights, const SelectionPolicy& policy) {
  const GstTemplate* best = nullptr;
  double best_cost = 0.0;
  for (const auto& t : catalog) {
    if (!admits(t, profile, policy)) continue;
    const double cost = template_cost(t, guaranteed_bandwidth(t, profile, policy), weights);
    if (!best || cost < best_cost || (cost == best_cost && t.id < best->id)) {
      best = &t;
      best_cost = cost;
    }
  }
  if (!best) {
    throw Error(ErrorCode::NoMatchingTemplate,
                "no template admits " + std::string(gridibn::to_string(profile.requirements.category)) +
                    " profile " + profile.id);
  }
  const auto& r = profile.requirements;
  Nest n;
  n.gst_id = best->id;
  n.slice_type = best->slice_type;
  n.max_latency_ms = r.latency_bound_ms;
  n.min_reliability = r.reliability;
  n.guaranteed_bandwidth_mbps = guaranteed_bandwidth(*best, profile, policy);
  n.max_device_density = r.device_count;
  n.isolation = best->isolation;
  n.source_profile = profile.id;
  return n;
}

std::optional<std::pair<std::string, std::string>> resolve_endpoints(
    const mano::Infrastructure& infra, const std::string& subject, const std::string& target) {
  auto resolve = [&](const std::string& ep) -> std::optional<std::string> {
    if (auto it = infra.endpoints.find(ep); it != infra.endpoints.end()) return it->second;
    if (infra.node(ep)) return ep;
    return std::nullopt;
  };
  auto in = resolve(subject);
  if (!in) return std::nullopt;
  auto out = target.empty() ? in : resolve(target);
  if (!out) return std::nullopt;
  return std::make_pair(*in, *out);
}

FeasibilityVerdict feasibility_check(const ServiceProfile& profile, const Nest& nest,
                                     const mano::ResourceSnapshot& snapshot,
                                     std::uint64_t current_version, const mano::ManoConfig& cfg) {
  if (current_version > snapshot.version + 1) {
    throw Error(ErrorCode::StaleSnapshot, "snapshot version " + std::to_string(snapshot.version) +
                                              " lags current " + std::to_string(current_version));
  }
  if (snapshot.nodes.empty()) return {false, "no-nodes", std::nullopt};
  const auto& r = profile.requirements;
  auto eps = resolve_endpoints(snapshot, r.subject, r.target);
  if (!eps) return {false, "unknown-endpoint", std::nullopt};

  mano::PlacementRequest req;
  req.chain = mano::plan_chain(cfg, nest);
  req.ingress = eps->first;
  req.egress = eps->second;
  req.max_latency_ms = nest.max_latency_ms;
  req.bandwidth_kbps = mbps_to_kbps(nest.guaranteed_bandwidth_mbps);
  if (req.chain.empty()) return {false, "no-chain", std::nullopt};

  if (auto p = mano::find_placement(snapshot, req, {cfg.exhaustive_limit, false})) {
    return {true, "", p};
  }
  if (mano::find_placement(snapshot, req, {cfg.exhaustive_limit, true})) {
    return {false, "resource", std::nullopt};
  }
  return {false, "no-path-within-latency", std::nullopt};
}

json emit_service_model(const ServiceProfile& profile, const Nest& nest) {
  const auto& r = profile.requirements;
  json requirements = {{"category", std::string(gridibn::to_string(r.category))},
                       {"latency-bound-ms", r.latency_bound_ms},
                       {"reliability", r.reliability},
                       {"bandwidth-mbps", r.bandwidth_mbps},
                       {"device-count", r.device_count},
                       {"subject", r.subject},
                       {"target", r.target}};
  if (r.application) requirements["application"] = std::string(gridibn::to_string(*r.application));
  return {{"schema", "gridibn.service-model/1"},
          {"customer-service",
           {{"intent-id", profile.customer_model_ref},
            {"stakeholder", std::string(gridibn::to_string(profile.stakeholder))},
            {"profile-id", profile.id},
            {"requirements", requirements}}},
          {"service-delivery",
           {{"gst-id", nest.gst_id},
            {"slice-type", std::string(gridibn::to_string(nest.slice_type))},
            {"max-latency-ms", nest.max_latency_ms},
            {"min-reliability", nest.min_reliability},
            {"guaranteed-bandwidth-mbps", nest.guaranteed_bandwidth_mbps},
            {"max-device-density", nest.max_device_density},
            {"isolation-level", std::string(gridibn::to_string(nest.isolation))},
            {"slice-id", "pending"}}}};
}

namespace {

void render_node(const json& j, int depth, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      os << pad << "container " << key << " {\n";
      render_node(value, depth + 1, os);
      os << pad << "}\n";
    } else {
      os << pad << "leaf " << key << " " << value.dump() << ";\n";
    }
  }
}

}  // namespace

std::string render_yang(const json& model) {
  std::ostringstream os;
  os << "module gridibn-service-model {\n";
  json body = model;
  body.erase("schema");
  render_node(body, 1, os);
  os << "}\n";
  return os.str();
}

ServiceProfile ServiceOrchestrator::build_service_profile(const intent::ServiceRequirementSet& reqs,
                                                          Stakeholder stakeholder) {
  ServiceProfile p;
  const std::string stem = reqs.source_intent.empty() ? std::string("anon") : reqs.source_intent;
  p.id = stem + "-p" + std::to_string(next_seq_++);
  p.requirements = reqs;
  p.customer_model_ref = reqs.source_intent;
  p.stakeholder = stakeholder;
  p.state = ProfileState::Draft;
  return p;
}

}  // namespace gridibn::service
