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

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridibn/common.hpp"
#include "gridibn/intent_dsl.hpp"
#include "gridibn/mano.hpp"
#include "gridibn/nest.hpp"
#include "json.hpp"

namespace gridibn::service {

/// What a template can promise. A profile is admitted when its demands lie
/// on the achievable side of every limit.
struct TemplateLimits {
  double latency_floor_ms = 0.0;
  double reliability_ceiling = 1.0;
  double bandwidth_ceiling_mbps = 0.0;
  std::int64_t device_density_ceiling = 1;
};

struct GstTemplate {
  std::string id;
  SliceCategory slice_type = SliceCategory::Urllc;
  Isolation isolation = Isolation::Shared;
  double cpu_units = 0.0;
  /// Minimum guaranteed bandwidth this template reserves.
  double bandwidth_tier_mbps = 0.0;
  TemplateLimits limits;
};

/// Throws SchemaError if the template's values fall outside physical ranges.
void check_template(const GstTemplate& t, const std::string& path = "");
std::vector<GstTemplate> gst_catalog_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const GstTemplate& t);

struct CostWeights {
  double cpu = 1.0;
  double bandwidth = 1.0;
  double dedicated_surcharge = 0.2;
};

/// (cpu * cpu_units + bandwidth * Mbps / 10) * (1 + surcharge if dedicated).
double template_cost(const GstTemplate& t, double guaranteed_bandwidth_mbps, const CostWeights& w);

enum class ProfileState { Draft, Validated, Provisioned, Degraded, Retired };

std::string_view to_string(ProfileState s);

struct ServiceProfile {
  std::string id;
  intent::ServiceRequirementSet requirements;
  /// Customer service model reference; the originating intent id.
  std::string customer_model_ref;
  Stakeholder stakeholder = Stakeholder::Dso;
  ProfileState state = ProfileState::Draft;
  std::optional<std::string> nsi_id;

  friend bool operator==(const ServiceProfile&, const ServiceProfile&) = default;
};

nlohmann::json to_json(const ServiceProfile& p);
ServiceProfile profile_from_json(const nlohmann::json& j);

/// Constraints used when re-selecting a NEST for an existing slice.
struct SelectionPolicy {
  std::optional<Isolation> isolation;
  double min_bandwidth_mbps = 0.0;
  std::set<std::string> excluded_templates;
};

bool admits(const GstTemplate& t, const ServiceProfile& profile, const SelectionPolicy& policy = {});

/// Cheapest admitting template, ties broken by template id, filled from the
/// profile. Throws NoMatchingTemplate.
Nest select_nest(const ServiceProfile& profile, const std::vector<GstTemplate>& catalog,
                 const CostWeights& weights = {}, const SelectionPolicy& policy = {});

struct FeasibilityVerdict {
  bool feasible = false;
  std::string reason;  // empty when feasible
  std::optional<mano::Placement> placement;
};

/// Endpoint id to node id, via the topology's attachment table or a node of
/// the same id. Empty target resolves to the ingress node.
std::optional<std::pair<std::string, std::string>> resolve_endpoints(
    const mano::Infrastructure& infra, const std::string& subject, const std::string& target);

/// Dry-run placement of the NEST's chain on the snapshot. Throws
/// StaleSnapshot when the snapshot lags the live version by more than one.
FeasibilityVerdict feasibility_check(const ServiceProfile& profile, const Nest& nest,
                                     const mano::ResourceSnapshot& snapshot,
                                     std::uint64_t current_version, const mano::ManoConfig& cfg);

/// Two-part service model: customer-service and service-delivery sections.
nlohmann::json emit_service_model(const ServiceProfile& profile, const Nest& nest);

/// YANG-style indented rendering of a service model document.
std::string render_yang(const nlohmann::json& model);

/// Owns profile id sequencing.
class ServiceOrchestrator {
 public:
  ServiceProfile build_service_profile(const intent::ServiceRequirementSet& reqs,
                                       Stakeholder stakeholder = Stakeholder::Dso);

  std::uint64_t next_sequence() const { return next_seq_; }
  void set_next_sequence(std::uint64_t s) { next_seq_ = s; }

 private:
  std::uint64_t next_seq_ = 1;
};

}  // namespace gridibn::service
