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

// Constrained intent language: parser, canonical renderer and translation of
// intents into service requirement sets. The grammar is documented in
// docs/intent-grammar.md.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridibn/common.hpp"
#include "json.hpp"

namespace gridibn::intent {

enum class Verb { Connect, Monitor, Protect, Measure, Inspect };

/// Declaration order is the canonical clause order used by render().
enum class Kpi { Latency, Reliability, Bandwidth, Devices };

enum class Comparator { Lt, Le, Eq, Ge, Gt };

enum class Unit { Ms, Percent, Mbps, Kbps, Count };

std::string_view to_string(Verb v);
std::string_view to_string(Kpi k);
std::string_view to_string(Comparator c);
std::string_view to_string(Unit u);

struct KpiClause {
  Kpi kpi = Kpi::Latency;
  Comparator comparator = Comparator::Le;
  double value = 0.0;
  Unit unit = Unit::Ms;
  /// Byte offset of the clause in the source text; ignored by ==.
  std::size_t position = 0;

  friend bool operator==(const KpiClause& a, const KpiClause& b) {
    return a.kpi == b.kpi && a.comparator == b.comparator && a.value == b.value &&
           a.unit == b.unit;
  }
};

struct IntentAst {
  Verb verb = Verb::Connect;
  std::string subject;
  std::optional<std::string> target;
  std::optional<Application> application;
  /// Sorted by Kpi, no duplicates.
  std::vector<KpiClause> kpi_clauses;
  Stakeholder stakeholder = Stakeholder::Dso;

  friend bool operator==(const IntentAst&, const IntentAst&) = default;
};

/// Parses intent text. Keywords are case-insensitive; endpoint identifiers
/// are case-sensitive. Throws SyntaxError (code SyntaxError or UnknownUnit).
IntentAst parse_intent(std::string_view text,
                       Stakeholder default_stakeholder = Stakeholder::Dso);

/// Canonical text; parse_intent(render(a)) == a for every valid AST.
std::string render(const IntentAst& ast);

/// Throws Error(SyntaxError) if the AST breaks a structural invariant.
void check_ast(const IntentAst& ast);

/// True if `word` is reserved and cannot be used as an endpoint identifier.
bool is_reserved_word(std::string_view word);

/// Allowed comparators and units for each KPI.
const std::vector<Comparator>& comparators_for(Kpi k);
const std::vector<Unit>& units_for(Kpi k);

struct RequirementDefaults {
  double latency_ms = 0.0;
  double reliability = 0.0;
  double bandwidth_mbps = 0.0;
  std::int64_t device_count = 1;
};

/// Per-application requirement defaults loaded from the catalog file.
class RequirementCatalog {
 public:
  RequirementCatalog() = default;
  explicit RequirementCatalog(std::map<Application, RequirementDefaults> entries)
      : entries_(std::move(entries)) {}

  static RequirementCatalog from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const RequirementDefaults* find(Application a) const;
  const std::map<Application, RequirementDefaults>& entries() const { return entries_; }

 private:
  std::map<Application, RequirementDefaults> entries_;
};

struct ServiceRequirementSet {
  SliceCategory category = SliceCategory::Urllc;
  double latency_bound_ms = 0.0;
  double reliability = 0.0;
  double bandwidth_mbps = 0.0;
  std::int64_t device_count = 1;
  std::string subject;
  std::string target;
  std::string source_intent;
  std::optional<Application> application;

  friend bool operator==(const ServiceRequirementSet&, const ServiceRequirementSet&) = default;
};

/// Category for an intent without an application class: device-heavy
/// requests are mMTC, tight latency is URLLC, everything else eMBB.
SliceCategory infer_category(double latency_ms, std::int64_t device_count);

/// Translates an AST into requirements. Explicit clauses override catalog
/// defaults. Throws UntranslatableIntent or ContradictoryClauses.
ServiceRequirementSet translate(const IntentAst& ast, const RequirementCatalog& catalog,
                                const std::string& intent_id = {});

nlohmann::json to_json(const ServiceRequirementSet& r);
ServiceRequirementSet requirements_from_json(const nlohmann::json& j);

}  // namespace gridibn::intent
