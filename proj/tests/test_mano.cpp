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
#include "gridibn/mano.hpp"
#include "placement_oracle.hpp"

using namespace gridibn;
using namespace gridibn::mano;
using nlohmann::json;

namespace {

Nest nest_of(SliceCategory c, double bw, std::int64_t devices, Isolation iso = Isolation::Shared) {
  Nest n;
  n.gst_id = "t";
  n.slice_type = c;
  n.max_latency_ms = 100;
  n.min_reliability = 0.99;
  n.guaranteed_bandwidth_mbps = bw;
  n.max_device_density = devices;
  n.isolation = iso;
  return n;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::SchemaError;
}

}  // namespace

TEST_CASE("reference topology loads") {
  const auto infra = testing::reference_topology();
  CHECK(infra.nodes.size() == 3);
  CHECK(infra.links.size() == 3);
  CHECK(infra.link("edge-core")->capacity_kbps == 100000);
  CHECK(infra.endpoints.at("central-pdc") == "core-c");
  CHECK(infrastructure_from_json(to_json(infra)) == infra);
}

TEST_CASE("topology schema errors carry a path") {
  auto doc = testing::read_json(testing::data_path("topology/reference.json"));
  auto expect_path = [](const json& d, const std::string& prefix) {
    try {
      topology_from_json(d);
      FAIL("no error");
    } catch (const SchemaError& e) {
      CHECK(e.path().rfind(prefix, 0) == 0);
    }
  };
  auto dup = doc;
  dup["nodes"][1]["id"] = "edge-a";
  expect_path(dup, "/nodes/1");
  auto loop = doc;
  loop["links"][2]["b"] = "regional-b";
  expect_path(loop, "/links/2");
  auto slow = doc;
  slow["links"][0]["latency_ms"] = 0;
  expect_path(slow, "/links/0/latency_ms");
  auto orphan = doc;
  orphan["endpoints"]["pmu-group-7"] = "mars";
  expect_path(orphan, "/endpoints/pmu-group-7");
  expect_path(json::array(), "");
}

TEST_CASE("URLLC NEST plans a two-VNF chain") {
  const auto chain = plan_chain(ManoConfig::defaults(), nest_of(SliceCategory::Urllc, 2, 20));
  REQUIRE(chain.size() == 2);
  CHECK(chain[0].type == "forwarder");
  CHECK(chain[1].type == "aggregator");
}

TEST_CASE("mMTC collector demand scales with device density") {
  const auto cfg = ManoConfig::defaults();
  const auto& t = cfg.vnf_types.at("collector");
  for (std::int64_t devices : {1000, 10000, 250000}) {
    const auto chain = plan_chain(cfg, nest_of(SliceCategory::Mmtc, 1, devices));
    REQUIRE(chain.at(0).type == "collector");
    const double k = static_cast<double>(devices) / 1000.0;
    CHECK(chain[0].demand.cpu_milli == std::llround(t.base.cpu_milli + t.cpu_milli_per_kdevice * k));
    CHECK(chain[0].demand.memory_mb == std::llround(t.base.memory_mb + t.memory_mb_per_kdevice * k));
  }
  // 10^4 meters: 500 + 200 * 10 milli-CPU, 512 + 64 * 10 MB
  CHECK(plan_chain(cfg, nest_of(SliceCategory::Mmtc, 1, 10000))[0].demand == ResourceVector{2500, 1152});
}

TEST_CASE("dedicated isolation inflates demand") {
  const auto cfg = ManoConfig::defaults();
  const auto shared = plan_chain(cfg, nest_of(SliceCategory::Urllc, 2, 20));
  const auto dedicated = plan_chain(cfg, nest_of(SliceCategory::Urllc, 2, 20, Isolation::Dedicated));
  for (std::size_t i = 0; i < shared.size(); ++i) {
    const auto& t = cfg.vnf_types.at(shared[i].type);
    const double cpu = t.base.cpu_milli + t.cpu_milli_per_mbps * 2 + t.cpu_milli_per_kdevice * 0.02;
    CHECK(shared[i].demand.cpu_milli == std::llround(cpu));
    CHECK(dedicated[i].demand.cpu_milli == std::llround(cpu * cfg.dedicated_factor));
  }
}

TEST_CASE("chain table matches the frozen copy") {
  const auto cfg = ManoConfig::from_json(testing::read_json(testing::data_path("mano.json")));
  json table = json::object();
  for (auto c : {SliceCategory::Urllc, SliceCategory::Embb, SliceCategory::Mmtc}) {
    for (auto iso : {Isolation::Shared, Isolation::Dedicated}) {
      json rows = json::array();
      for (const auto& d : plan_chain(cfg, nest_of(c, 10, 10000, iso))) {
        rows.push_back({{"type", d.type},
                        {"cpu_milli", d.demand.cpu_milli},
                        {"memory_mb", d.demand.memory_mb},
                        {"processing_ms", d.processing_ms}});
      }
      table[std::string(to_string(c)) + "/" + std::string(to_string(iso))] = rows;
    }
  }
  const auto text = table.dump(2) + "\n";
  const auto path = testing::golden_path("chain_table.json");
  if (std::getenv("GRIDIBN_UPDATE_GOLDEN")) std::ofstream(path) << text;
  CHECK(testing::read_text(path) == text);
  CHECK(ManoConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
}

TEST_CASE("placement on the reference topology") {
  const auto infra = testing::reference_topology();
  PlacementRequest req;
  req.chain = plan_chain(ManoConfig::defaults(), nest_of(SliceCategory::Urllc, 2, 20));
  req.ingress = "edge-a";
  req.egress = "core-c";
  req.max_latency_ms = 10;
  req.bandwidth_kbps = 2000;
  auto p = find_placement(infra, req);
  REQUIRE(p);
  CHECK(p->latency_ms == 3.5);
  CHECK(testing::check_placement(infra, req, *p) == "");

  req.excluded_links = {"edge-core"};
  p = find_placement(infra, req);
  REQUIRE(p);
  CHECK(p->latency_ms == 7.5);
  CHECK(p->path == std::vector<std::string>{"edge-regional", "regional-core"});

  req.max_latency_ms = 7;
  CHECK_FALSE(find_placement(infra, req));
}

TEST_CASE("placement matches the oracle on random small topologies") {
  std::mt19937_64 rng(3);
  const auto cfg = ManoConfig::defaults();
  int feasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = 1 + rng() % 4;
    auto infra = testing::random_topology(rng, n, 0.5, 6000, 8192, 10);
    PlacementRequest req;
    req.chain = plan_chain(cfg, nest_of(static_cast<SliceCategory>(rng() % 3), 1 + rng() % 5, 2000));
    req.chain.resize(1 + rng() % req.chain.size());
    req.ingress = infra.nodes[rng() % n].id;
    req.egress = infra.nodes[rng() % n].id;
    req.max_latency_ms = 1.0 + static_cast<double>(rng() % 16);
    req.bandwidth_kbps = mbps_to_kbps(1 + rng() % 8);
    if (rng() % 4 == 0 && !infra.links.empty()) req.excluded_links.insert(infra.links[rng() % infra.links.size()].id);
    if (rng() % 4 == 0) req.excluded_nodes.insert(infra.nodes[rng() % n].id);

    const auto oracle = testing::brute_force_placement(infra, req);
    const auto got = find_placement(infra, req);
    REQUIRE(got.has_value() == oracle.feasible);
    if (got) {
      ++feasible;
      REQUIRE(got->latency_ms == oracle.latency_ms);
      REQUIRE(testing::check_placement(infra, req, *got) == "");
    }
  }
  CHECK(feasible > 100);
}

TEST_CASE("greedy fallback yields valid placements") {
  std::mt19937_64 rng(4);
  const auto cfg = ManoConfig::defaults();
  int placed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto infra = testing::random_topology(rng, 10, 0.3, 6000, 8192, 10);
    PlacementRequest req;
    req.chain = plan_chain(cfg, nest_of(SliceCategory::Embb, 2, 100));
    req.ingress = infra.nodes[rng() % 10].id;
    req.egress = infra.nodes[rng() % 10].id;
    req.max_latency_ms = 30;
    req.bandwidth_kbps = 2000;
    const auto p = find_placement(infra, req, {10, false});
    if (!p) continue;
    ++placed;
    REQUIRE(testing::check_placement(infra, req, *p) == "");
    // never better than the exhaustive optimum
    const auto best = find_placement(infra, req, {1000000, false});
    REQUIRE(best);
    CHECK(p->latency_ms >= best->latency_ms);
  }
  CHECK(placed > 50);
}

TEST_CASE("VNFM and VIM errors leave the ledger unchanged") {
  Mano m;
  m.load_topology(testing::reference_topology());
  const auto before = m.vim_snapshot();
  CHECK(code_of([&] { m.vnfm_deploy({"forwarder", {9000, 1}, 0.5}, "edge-a"); }) == ErrorCode::ResourceExhausted);
  CHECK(code_of([&] { m.vnfm_deploy({"forwarder", {1, 1}, 0.5}, "mars"); }) == ErrorCode::UnknownNode);
  CHECK(code_of([&] { m.vnfm_teardown("vnf-404"); }) == ErrorCode::UnknownInstance);
  CHECK(code_of([&] { m.vim_reserve_link("edge-core", 100001); }) == ErrorCode::ResourceExhausted);
  CHECK(code_of([&] { m.vim_reserve_link("nowhere", 1); }) == ErrorCode::UnknownLink);
  CHECK(m.vim_snapshot() == before);
  CHECK(m.check_ledger() == "");
}

TEST_CASE("teardown returns exactly the deployed demand") {
  Mano m;
  m.load_topology(testing::reference_topology());
  const auto inst = m.vnfm_deploy({"aggregator", {1500, 800}, 1.0}, "regional-b");
  CHECK(m.infrastructure().node("regional-b")->usage == ResourceVector{1500, 800});
  CHECK(m.vnfm_teardown(inst.id) == ResourceVector{1500, 800});
  CHECK(m.infrastructure().node("regional-b")->usage.is_zero());
}

TEST_CASE("topology cannot be replaced under deployed VNFs") {
  Mano m;
  m.load_topology(testing::reference_topology());
  m.vnfm_deploy({"forwarder", {100, 100}, 0.5}, "edge-a");
  CHECK(code_of([&] { m.load_topology(testing::reference_topology()); }) == ErrorCode::IllegalState);
}

TEST_CASE("committed placements reserve each distinct link once and roll back on teardown") {
  Mano m;
  m.load_topology(testing::reference_topology());
  PlacementRequest req;
  req.chain = plan_chain(m.config(), nest_of(SliceCategory::Urllc, 2, 20));
  req.ingress = "edge-a";
  req.egress = "core-c";
  req.max_latency_ms = 50;
  req.bandwidth_kbps = 2000;
  req.excluded_nodes = {"edge-a", "core-c"};  // forces both VNFs onto regional-b
  const auto c = m.place_chain(req, PlaceMode::Commit);
  CHECK(c.placement.vnf_nodes == std::vector<std::string>{"regional-b", "regional-b"});
  CHECK(m.infrastructure().link("edge-regional")->used_kbps == 2000);
  CHECK(m.infrastructure().link("regional-core")->used_kbps == 2000);
  CHECK(m.infrastructure().link("edge-core")->used_kbps == 0);
  CHECK(m.check_ledger() == "");

  const auto dry = m.place_chain(req, PlaceMode::DryRun);
  CHECK(dry.instance_ids.empty());
  CHECK(m.instances().size() == 2);

  for (const auto& id : c.instance_ids) m.vnfm_teardown(id);
  for (const auto& [link, kbps] : c.link_allocations) m.vim_release_link(link, kbps);
  for (const auto& l : m.infrastructure().links) CHECK(l.used_kbps == 0);
  for (const auto& n : m.infrastructure().nodes) CHECK(n.usage.is_zero());
}

TEST_CASE("random deploy and teardown never breaks the ledger") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 20; ++round) {
    Mano m;
    m.load_topology(testing::random_topology(rng, 1 + rng() % 10));
    std::vector<std::string> live;
    std::vector<std::pair<std::string, Kbps>> links;
    for (int op = 0; op < 300; ++op) {
      const auto& infra = m.infrastructure();
      switch (rng() % 4) {
        case 0:
        case 1: {
          const auto& node = infra.nodes[rng() % infra.nodes.size()];
          try {
            live.push_back(m.vnfm_deploy({"x", {1 + static_cast<std::int64_t>(rng() % 3000),
                                                1 + static_cast<std::int64_t>(rng() % 6000)}, 1.0},
                                         node.id).id);
          } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::ResourceExhausted);
          }
          break;
        }
        case 2:
          if (!live.empty()) {
            const auto i = rng() % live.size();
            m.vnfm_teardown(live[i]);
            live.erase(live.begin() + static_cast<long>(i));
          }
          break;
        default: {
          if (infra.links.empty()) break;
          const auto& l = infra.links[rng() % infra.links.size()];
          const Kbps kbps = 1 + static_cast<Kbps>(rng() % 50000);
          try {
            m.vim_reserve_link(l.id, kbps);
            links.emplace_back(l.id, kbps);
          } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::ResourceExhausted);
          }
        }
      }
      for (const auto& n : m.infrastructure().nodes) {
        REQUIRE(n.usage.non_negative());
        REQUIRE(n.usage.fits_within(n.capacity));
      }
      for (const auto& l : m.infrastructure().links) {
        REQUIRE(l.used_kbps >= 0);
        REQUIRE(l.used_kbps <= l.capacity_kbps);
      }
      REQUIRE(m.check_ledger() == "");
    }
    for (const auto& id : live) m.vnfm_teardown(id);
    for (const auto& [id, kbps] : links) m.vim_release_link(id, kbps);
    for (const auto& n : m.infrastructure().nodes) CHECK(n.usage.is_zero());
    for (const auto& l : m.infrastructure().links) CHECK(l.used_kbps == 0);
  }
}

TEST_CASE("a snapshot is a value; later changes do not reach it") {
  Mano m;
  m.load_topology(testing::reference_topology());
  m.vnfm_deploy({"forwarder", {100, 100}, 0.5}, "edge-a");
  const auto snap = m.vim_snapshot();
  const auto before = to_json(snap).dump();
  m.vnfm_deploy({"forwarder", {100, 100}, 0.5}, "core-c");
  m.inject_link_degradation("edge-core", 20, 0.1);
  CHECK(to_json(snap).dump() == before);
  CHECK(m.version() > snap.version);
}

TEST_CASE("link degradation is set, reported and reversible") {
  Mano m;
  m.load_topology(testing::reference_topology());
  const auto v0 = m.version();
  auto prev = m.inject_link_degradation("edge-core", 20, 0.0);
  CHECK(prev.degradation_ms == 0.0);
  CHECK(m.infrastructure().link("edge-core")->latency_ms() == 22.0);
  CHECK(m.version() == v0 + 1);
  prev = m.inject_link_degradation("edge-core", 0, 0.0);
  CHECK(prev.degradation_ms == 20.0);
  CHECK(m.infrastructure().link("edge-core")->latency_ms() == 2.0);
  CHECK(code_of([&] { m.inject_link_degradation("nowhere", 1, 0); }) == ErrorCode::UnknownLink);
  CHECK(code_of([&] { m.inject_link_degradation("edge-core", 1, 1.5); }) == ErrorCode::SchemaError);
}

TEST_CASE("MANO state round trips through JSON") {
  Mano m;
  m.load_topology(testing::reference_topology());
  m.vnfm_deploy({"forwarder", {100, 100}, 0.5}, "edge-a");
  m.vim_reserve_link("edge-core", 5000);
  m.inject_link_degradation("regional-core", 4, 0.01);
  Mano copy;
  copy.restore(m.to_json());
  CHECK(copy.to_json() == m.to_json());
  CHECK(copy.vim_snapshot() == m.vim_snapshot());
  CHECK(copy.instances() == m.instances());
  CHECK(copy.next_instance_seq() == m.next_instance_seq());
}
