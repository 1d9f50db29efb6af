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

#include "gridibn/sla_registry.hpp"

#include <algorithm>
#include <tuple>
#include <cmath>
#include <sstream>

namespace gridibn::sla {

namespace {

std::pair<Stakeholder, Stakeholder> normalized(Stakeholder a, Stakeholder b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::json to_json(const Sla& s) {
  nlohmann::json cats = nlohmann::json::array();
  for (auto c : s.permitted_categories) cats.push_back(std::string(to_string(c)));
  return {{"id", s.id},
          {"parties", {std::string(to_string(s.parties.first)),
                       std::string(to_string(s.parties.second))}},
          {"permitted_categories", cats},
          {"kpi_bounds",
           {{"max_reliability", s.kpi_bounds.max_reliability},
            {"min_latency_ms", s.kpi_bounds.min_latency_ms},
            {"max_bandwidth_mbps", s.kpi_bounds.max_bandwidth_mbps},
            {"max_device_count", s.kpi_bounds.max_device_count}}},
          {"priority", s.priority},
          {"valid", s.valid}};
}

Sla sla_from_json(const nlohmann::json& j, const std::string& path) {
  Sla s;
  try {
    s.id = j.at("id").get<std::string>();
    const auto& parties = j.at("parties");
    if (!parties.is_array() || parties.size() != 2) {
      throw SchemaError(path + "/parties", "expected two stakeholders");
    }
    auto a = parse_stakeholder(parties[0].get<std::string>());
    auto b = parse_stakeholder(parties[1].get<std::string>());
    if (!a || !b) throw SchemaError(path + "/parties", "unknown stakeholder");
    s.parties = {*a, *b};
    for (const auto& c : j.at("permitted_categories")) {
      auto cat = parse_category(c.get<std::string>());
      if (!cat) throw SchemaError(path + "/permitted_categories", "unknown category");
      s.permitted_categories.insert(*cat);
    }
    const auto& kb = j.at("kpi_bounds");
    s.kpi_bounds.max_reliability = kb.at("max_reliability").get<double>();
    s.kpi_bounds.min_latency_ms = kb.at("min_latency_ms").get<double>();
    s.kpi_bounds.max_bandwidth_mbps = kb.at("max_bandwidth_mbps").get<double>();
    s.kpi_bounds.max_device_count = kb.at("max_device_count").get<std::int64_t>();
    s.priority = j.value("priority", 1);
    s.valid = j.value("valid", true);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path, e.what());
  }
  return s;
}

void check_sla(const Sla& s) {
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::InvalidSla, "SLA '" + s.id + "': " + why);
  };
  if (s.id.empty()) bad("empty id");
  if (s.parties.first == s.parties.second) bad("parties must be distinct");
  if (s.permitted_categories.empty()) bad("no permitted category");
  const auto& b = s.kpi_bounds;
  if (!(b.max_reliability >= 0.0 && b.max_reliability <= 1.0)) bad("max_reliability outside [0,1]");
  if (!(b.min_latency_ms >= 0.0) || !std::isfinite(b.min_latency_ms)) bad("min_latency_ms must be finite and >= 0");
  if (!(b.max_bandwidth_mbps > 0.0)) bad("max_bandwidth_mbps must be > 0");
  if (b.max_device_count < 1) bad("max_device_count must be >= 1");
}

ValidationResult check_against(const intent::ServiceRequirementSet& reqs, const Sla& sla) {
  ValidationResult r;
  r.sla_id = sla.id;
  const auto& b = sla.kpi_bounds;
  if (!sla.permitted_categories.contains(reqs.category)) {
    r.reasons.push_back({"category", std::string(to_string(reqs.category)) + " not permitted"});
  }
  if (reqs.reliability > b.max_reliability) {
    r.reasons.push_back({"reliability", fmt(reqs.reliability) + " > " + fmt(b.max_reliability)});
  }
  if (reqs.latency_bound_ms < b.min_latency_ms) {
    r.reasons.push_back({"latency", fmt(reqs.latency_bound_ms) + " ms < " + fmt(b.min_latency_ms) + " ms"});
  }
  if (reqs.bandwidth_mbps > b.max_bandwidth_mbps) {
    r.reasons.push_back({"bandwidth", fmt(reqs.bandwidth_mbps) + " Mbps > " + fmt(b.max_bandwidth_mbps) + " Mbps"});
  }
  if (reqs.device_count > b.max_device_count) {
    r.reasons.push_back({"devices", std::to_string(reqs.device_count) + " > " + std::to_string(b.max_device_count)});
  }
  r.accepted = r.reasons.empty();
  return r;
}

std::string SlaRegistry::register_sla(Sla sla) {
  check_sla(sla);
  if (slas_.contains(sla.id)) {
    throw Error(ErrorCode::DuplicateId, "SLA id '" + sla.id + "' already registered");
  }
  auto id = sla.id;
  slas_.emplace(id, std::move(sla));
  return id;
}

std::vector<Sla> SlaRegistry::lookup(Stakeholder a, Stakeholder b) const {
  const auto key = normalized(a, b);
  std::vector<Sla> out;
  for (const auto& [id, s] : slas_) {
    if (s.valid && normalized(s.parties.first, s.parties.second) == key) out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const Sla& x, const Sla& y) {
    return std::tie(x.priority, x.id) < std::tie(y.priority, y.id);
  });
  return out;
}

ValidationResult SlaRegistry::validate(const intent::ServiceRequirementSet& reqs,
                                       Stakeholder stakeholder) const {
  auto candidates = lookup(stakeholder, Stakeholder::Csp);
  if (candidates.empty() || stakeholder == Stakeholder::Csp) {
    throw Error(ErrorCode::NoSlaOnFile,
                "no SLA on file between " + std::string(to_string(stakeholder)) + " and CSP");
  }
  return check_against(reqs, candidates.front());
}

void SlaRegistry::invalidate(const std::string& id) {
  auto it = slas_.find(id);
  if (it == slas_.end()) throw Error(ErrorCode::UnknownId, "unknown SLA '" + id + "'");
  it->second.valid = false;
}

const Sla* SlaRegistry::find(const std::string& id) const {
  auto it = slas_.find(id);
  return it == slas_.end() ? nullptr : &it->second;
}

}  // namespace gridibn::sla
