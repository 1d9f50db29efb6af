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

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridibn/common.hpp"
#include "gridibn/intent_dsl.hpp"
#include "json.hpp"

namespace gridibn::sla {

/// Limits on how demanding a requirement set may be. Each bound caps the
/// demand direction only, so tightening a request can never bring it back
/// inside an SLA.
struct KpiBounds {
  double max_reliability = 1.0;
  double min_latency_ms = 0.0;
  double max_bandwidth_mbps = 0.0;
  std::int64_t max_device_count = 1;

  friend bool operator==(const KpiBounds&, const KpiBounds&) = default;
};

struct Sla {
  std::string id;
  std::pair<Stakeholder, Stakeholder> parties{Stakeholder::Dso, Stakeholder::Csp};
  std::set<SliceCategory> permitted_categories;
  KpiBounds kpi_bounds;
  int priority = 1;
  bool valid = true;

  friend bool operator==(const Sla&, const Sla&) = default;
};

nlohmann::json to_json(const Sla& s);
/// Throws SchemaError for malformed documents.
Sla sla_from_json(const nlohmann::json& j, const std::string& path = "");

/// Throws Error(InvalidSla) describing the first broken invariant.
void check_sla(const Sla& s);

struct Violation {
  std::string kpi;  // "category", "reliability", "latency", "bandwidth", "devices"
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationResult {
  bool accepted = false;
  std::string sla_id;
  std::vector<Violation> reasons;
};

/// Checks requirements against one SLA; lists every violated bound.
ValidationResult check_against(const intent::ServiceRequirementSet& reqs, const Sla& sla);

class SlaRegistry {
 public:
  /// Throws DuplicateId or InvalidSla.
  std::string register_sla(Sla sla);

  /// Valid SLAs for the unordered party pair, ordered by (priority, id).
  std::vector<Sla> lookup(Stakeholder a, Stakeholder b) const;

  /// Validates against the governing SLA for (stakeholder, CSP): the valid one
  /// with the lowest priority number, ties broken by id. Throws NoSlaOnFile.
  ValidationResult validate(const intent::ServiceRequirementSet& reqs,
                            Stakeholder stakeholder) const;

  /// Marks an SLA invalid. Throws UnknownId.
  void invalidate(const std::string& id);

  const Sla* find(const std::string& id) const;
  const std::map<std::string, Sla>& all() const { return slas_; }
  void clear() { slas_.clear(); }

 private:
  std::map<std::string, Sla> slas_;
};

}  // namespace gridibn::sla
