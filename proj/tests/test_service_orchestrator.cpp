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


#include <cstdlib>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "gridibn/service_orchestrator.hpp"
#include "placement_oracle.hpp"

using namespace gridibn;
using namespace gridibn::service;
using nlohmann::json;

namespace {

std::vector<GstTemplate> catalog() {
  return gst_catalog_from_json(testing::read_json(testing::data_path("gst_catalog.json")));
}

intent::RequirementCatalog requirements() {
  return intent::RequirementCatalog::from_json(testing::read_json(testing::data_path("requirement_catalog.json")));
}

ServiceProfile profile_for(const std::string& text, const std::string& id = "intent-1") {
  ServiceOrchestrator so;
  return so.build_service_profile(intent::translate(intent::parse_intent(text), requirements(), id));
}

// Writes the golden file when GRIDIBN_UPDATE_GOLDEN is set, else compares.
void check_golden(const std::string& name, const std::string& actual) {
  const auto path = testing::golden_path(name);
  if (std::getenv("GRIDIBN_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  CAPTURE(name);
  CHECK(testing::read_text(path) == actual);
}

}  // namespace

TEST_CASE("profiles start as drafts carrying the requirement category") {
  ServiceOrchestrator so;
  const auto wams = intent::translate(intent::parse_intent("CONNECT pmu-group-7 TO central-pdc FOR wams"),
                                      requirements(), "intent-1");
  const auto p = so.build_service_profile(wams);
  CHECK(p.state == ProfileState::Draft);
  CHECK(p.requirements.category == SliceCategory::Urllc);
  CHECK(p.customer_model_ref == "intent-1");
  CHECK(p.id == "intent-1-p1");
  CHECK_FALSE(p.nsi_id.has_value());
  CHECK(so.build_service_profile(wams).id == "intent-1-p2");
  CHECK(profile_from_json(to_json(p)) == p);

  CHECK(profile_for("MEASURE m TO h FOR ami").requirements.category == SliceCategory::Mmtc);
}

TEST_CASE("WAMS selects a URLLC template able to carry five nines") {
  const auto n = select_nest(profile_for("CONNECT pmu-group-7 TO central-pdc FOR wams"), catalog());
  CHECK(n.slice_type == SliceCategory::Urllc);
  CHECK(n.gst_id == "urllc-dedicated");
  CHECK(n.max_latency_ms == 10.0);
  CHECK(n.min_reliability == 0.99999);
  CHECK(n.source_profile == "intent-1-p1");
}

TEST_CASE("inspection NEST guarantees the requested 25 Mbps") {
  const auto n = select_nest(profile_for("INSPECT drone-cam-1 TO inspection-hub FOR remote_inspection"), catalog());
  CHECK(n.slice_type == SliceCategory::Embb);
  CHECK(n.guaranteed_bandwidth_mbps == 25.0);
  CHECK(n.isolation == Isolation::Shared);
}

TEST_CASE("bandwidth is raised to the template tier") {
  const auto n = select_nest(profile_for("CONNECT a TO b FOR wams WITH reliability >= 99.9 %"), catalog());
  CHECK(n.gst_id == "urllc-shared");
  CHECK(n.guaranteed_bandwidth_mbps == 2.0);
}

TEST_CASE("no admissible template") {
  try {
    select_nest(profile_for("CONNECT a TO b FOR wams WITH latency <= 0.1 ms"), catalog());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoMatchingTemplate);
  }
}

TEST_CASE("selection policy narrows the choice") {
  const auto p = profile_for("CONNECT a TO b FOR wams WITH reliability >= 99.9 %");
  SelectionPolicy dedicated;
  dedicated.isolation = Isolation::Dedicated;
  CHECK(select_nest(p, catalog(), {}, dedicated).gst_id == "urllc-dedicated");
  SelectionPolicy excluded;
  excluded.excluded_templates = {"urllc-shared"};
  CHECK(select_nest(p, catalog(), {}, excluded).gst_id == "urllc-dedicated");
  SelectionPolicy wide;
  wide.min_bandwidth_mbps = 20;
  CHECK(select_nest(p, catalog(), {}, wide).guaranteed_bandwidth_mbps == 20.0);
}

TEST_CASE("select_nest returns the cheapest admissible template") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<GstTemplate> cat;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      GstTemplate t;
      t.id = "t" + std::to_string(rng() % 100);
      t.slice_type = static_cast<SliceCategory>(rng() % 3);
      t.isolation = rng() % 2 ? Isolation::Dedicated : Isolation::Shared;
      t.cpu_units = 1.0 + static_cast<double>(rng() % 8);
      t.bandwidth_tier_mbps = static_cast<double>(rng() % 20);
      t.limits = {10.0 * u(rng), 0.99 + 0.01 * u(rng), 5.0 + 50.0 * u(rng),
                  1 + static_cast<std::int64_t>(rng() % 20000)};
      cat.push_back(t);
    }
    ServiceProfile p;
    p.id = "p";
    p.requirements.category = static_cast<SliceCategory>(rng() % 3);
    p.requirements.latency_bound_ms = 0.5 + 20.0 * u(rng);
    p.requirements.reliability = 0.99 + 0.01 * u(rng);
    p.requirements.bandwidth_mbps = 0.1 + 30.0 * u(rng);
    p.requirements.device_count = 1 + static_cast<std::int64_t>(rng() % 20000);
    const CostWeights w{u(rng) * 2, u(rng) * 2, u(rng)};

    // reference: spelled-out admission and cost over every template
    const GstTemplate* best = nullptr;
    double best_cost = 0.0;
    double best_bw = 0.0;
    for (const auto& t : cat) {
      const auto& r = p.requirements;
      const double bw = std::max(r.bandwidth_mbps, t.bandwidth_tier_mbps);
      const bool ok = t.slice_type == r.category && r.latency_bound_ms >= t.limits.latency_floor_ms &&
                      r.reliability <= t.limits.reliability_ceiling && bw <= t.limits.bandwidth_ceiling_mbps &&
                      r.device_count <= t.limits.device_density_ceiling;
      if (!ok) continue;
      double cost = w.cpu * t.cpu_units + w.bandwidth * bw / 10.0;
      if (t.isolation == Isolation::Dedicated) cost *= 1.0 + w.dedicated_surcharge;
      if (!best || cost < best_cost || (cost == best_cost && t.id < best->id)) {
        best = &t;
        best_cost = cost;
        best_bw = bw;
      }
    }
    if (!best) {
      CHECK_THROWS_AS(select_nest(p, cat, w), Error);
      continue;
    }
    ++compared;
    const auto n_ = select_nest(p, cat, w);
    REQUIRE(n_.gst_id == best->id);
    REQUIRE(n_.guaranteed_bandwidth_mbps == best_bw);
    REQUIRE(n_.slice_type == p.requirements.category);
  }
  CHECK(compared > 300);
}

TEST_CASE("feasibility on the reference topology") {
  const auto infra = testing::reference_topology();
  const auto cfg = mano::ManoConfig::defaults();
  const auto p = profile_for("CONNECT pmu-group-7 TO central-pdc FOR wams");
  const auto n = select_nest(p, catalog());
  const auto v = feasibility_check(p, n, infra, infra.version, cfg);
  REQUIRE(v.feasible);
  CHECK(v.placement->latency_ms == 3.5);
  CHECK(v.placement->path == std::vector<std::string>{"edge-core"});

  auto far = p;
  far.requirements.target = "atlantis";
  CHECK(feasibility_check(far, n, infra, infra.version, cfg).reason == "unknown-endpoint");

  auto tight = n;
  tight.max_latency_ms = 3.0;
  CHECK(feasibility_check(p, tight, infra, infra.version, cfg).reason == "no-path-within-latency");

  auto greedy_bw = n;
  greedy_bw.guaranteed_bandwidth_mbps = 500;
  CHECK(feasibility_check(p, greedy_bw, infra, infra.version, cfg).reason == "resource");
}

TEST_CASE("a snapshot more than one version behind is stale") {
  auto infra = testing::reference_topology();
  const auto p = profile_for("CONNECT pmu-group-7 TO central-pdc FOR wams");
  const auto n = select_nest(p, catalog());
  infra.version = 3;
  CHECK_NOTHROW(feasibility_check(p, n, infra, 4, mano::ManoConfig::defaults()));
  try {
    feasibility_check(p, n, infra, 5, mano::ManoConfig::defaults());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StaleSnapshot);
  }
}

TEST_CASE("feasibility agrees with the exhaustive oracle on three nodes") {
  std::mt19937_64 rng(11);
  const auto cfg = mano::ManoConfig::defaults();
  auto p = profile_for("CONNECT n0 TO n2 FOR wams");
  int feasible = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto infra = testing::random_topology(rng, 3, 0.5, 9000, 8192, 20);
    // pre-load some usage so capacity matters
    for (auto& node : infra.nodes) node.usage = {static_cast<std::int64_t>(rng() % 4000), 0};
    auto n = select_nest(p, catalog());
    n.max_latency_ms = 2.0 + static_cast<double>(rng() % 12);
    n.guaranteed_bandwidth_mbps = static_cast<double>(1 + rng() % 15);

    mano::PlacementRequest req;
    req.chain = mano::plan_chain(cfg, n);
    req.ingress = "n0";
    req.egress = "n2";
    req.max_latency_ms = n.max_latency_ms;
    req.bandwidth_kbps = mbps_to_kbps(n.guaranteed_bandwidth_mbps);
    const auto oracle = testing::brute_force_placement(infra, req);

    const auto v = feasibility_check(p, n, infra, infra.version, cfg);
    REQUIRE(v.feasible == oracle.feasible);
    if (v.feasible) {
      ++feasible;
      REQUIRE(v.placement->latency_ms == oracle.latency_ms);
      REQUIRE(testing::check_placement(infra, req, *v.placement) == "");
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible > 20);
  CHECK(infeasible > 20);
}

TEST_CASE("service delivery model for WAMS") {
  const auto p = profile_for("CONNECT pmu-group-7 TO central-pdc FOR wams");
  const auto model = emit_service_model(p, select_nest(p, catalog()));
  CHECK(model["service-delivery"]["slice-type"] == "URLLC");
  CHECK(model["service-delivery"]["max-latency-ms"] == 10.0);
  CHECK(model["customer-service"]["intent-id"] == "intent-1");
}

TEST_CASE("service models match the golden corpus") {
  const std::pair<const char*, const char*> cases[] = {
      {"wams", "CONNECT pmu-group-7 TO central-pdc FOR wams"},
      {"protection", "PROTECT ied-group-3 TO scada-master FOR protection_flisr"},
      {"ami", "MEASURE meter-field-2 TO mdm-head-end FOR ami"},
      {"inspection", "INSPECT drone-cam-1 TO inspection-hub FOR remote_inspection"},
      {"custom", "MONITOR feeder-12 TO dms WITH latency <= 50 ms, reliability >= 99.9 %, bandwidth >= 500 kbps"},
  };
  for (const auto& [name, text] : cases) {
    const auto p = profile_for(text);
    const auto model = emit_service_model(p, select_nest(p, catalog()));
    check_golden(std::string("service_model_") + name + ".json", model.dump(2) + "\n");
    check_golden(std::string("service_model_") + name + ".yang", render_yang(model));
  }
}

TEST_CASE("catalog documents are validated") {
  auto doc = testing::read_json(testing::data_path("gst_catalog.json"));
  CHECK(gst_catalog_from_json(doc).size() == 5);
  auto dup = doc;
  dup["templates"].push_back(doc["templates"][0]);
  CHECK_THROWS_AS(gst_catalog_from_json(dup), Error);
  auto bad = doc;
  bad["templates"][1]["limits"]["reliability_ceiling"] = 2;
  try {
    gst_catalog_from_json(bad);
    FAIL("no error");
  } catch (const SchemaError& e) {
    CHECK(e.path().rfind("/templates/1", 0) == 0);
  }
  for (const auto& t : catalog()) CHECK(to_json(gst_catalog_from_json({{"templates", {to_json(t)}}}).at(0)) == to_json(t));
}
