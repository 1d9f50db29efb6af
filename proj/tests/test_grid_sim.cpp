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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "gridibn/grid_sim.hpp"

using namespace gridibn;
using namespace gridibn::sim;
using nlohmann::json;

namespace {

Nest nest_of(SliceCategory cat, double bw = 2.0, double latency = 10.0) {
  Nest n;
  n.gst_id = "t";
  n.slice_type = cat;
  n.max_latency_ms = latency;
  n.min_reliability = 0.99;
  n.guaranteed_bandwidth_mbps = bw;
  n.max_device_density = 20;
  n.isolation = Isolation::Shared;
  n.source_profile = "p";
  return n;
}

struct Rig {
  mano::Mano mano;
  slice::SliceOrchestrator slices{mano};
  std::vector<KpiSample> samples;
  SimParams params;
  std::unique_ptr<Simulator> sim;
  std::string nsi;

  explicit Rig(const json& topo, std::uint64_t seed = 1, SliceCategory cat = SliceCategory::Urllc,
               double bw = 2.0) {
    mano.load_topology(mano::topology_from_json(topo));
    nsi = slices.instantiate(nest_of(cat, bw), "a", "b").id;
    sim = std::make_unique<Simulator>(params, seed, mano, slices,
                                      [this](const KpiSample& s) { samples.push_back(s); });
  }
};

TrafficSource pmu(std::int64_t devices = 10) {
  TrafficSource s;
  s.id = "pmu";
  s.cls = TrafficClass::PmuWams;
  s.attach = "src";
  s.rate = 50;
  s.devices = devices;
  s.payload_bytes = 200;
  return s;
}

TrafficSource flisr() {
  TrafficSource s;
  s.id = "ied";
  s.cls = TrafficClass::ProtectionFlisr;
  s.attach = "src";
  s.rate = 1;
  s.devices = 20;
  s.payload_bytes = 300;
  return s;
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

std::string schema_path_of(const json& doc) {
  try {
    load_scenario(doc, testing::data_path("scenarios"));
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<none>";
}

// Smallest v with at least 99% of values <= v.
double p99_oracle(const std::vector<double>& v) {
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (double x : sorted) {
    const auto le = std::count_if(v.begin(), v.end(), [&](double y) { return y <= x; });
    if (100 * le >= 99 * static_cast<std::int64_t>(v.size())) return x;
  }
  return sorted.back();
}

}  // namespace

TEST_CASE("reference scenario loads") {
  const auto sc = load_scenario_file(testing::data_path("scenarios/wams-reference.json"));
  CHECK(sc.name == "wams-reference");
  CHECK(sc.seed == 42);
  CHECK(sc.duration_s == 120);
  REQUIRE(sc.intents.size() == 1);
  REQUIRE(sc.sources.size() == 1);
  CHECK(sc.sources[0].offered_rate() == doctest::Approx(500));
  CHECK(sc.sources[0].offered_mbps() == doctest::Approx(0.8));
  REQUIRE(sc.faults.size() == 1);
  CHECK(sc.faults[0].kind == FaultKind::LinkDegradation);
  CHECK(sc.faults[0].extra_latency_ms == 20);
  CHECK(mano::topology_from_json(sc.topology).nodes.size() == 3);
}

TEST_CASE("scenario schema errors carry a path") {
  const auto base = testing::read_json(testing::data_path("scenarios/grid-mixed.json"));
  CHECK_NOTHROW(load_scenario(base, testing::data_path("scenarios")));

  auto d = base;
  d["schema"] = "gridibn.scenario/0";
  CHECK(schema_path_of(d) == "/schema");
  d = base;
  d["sources"][0]["class"] = "SMART_FRIDGE";
  CHECK(schema_path_of(d) == "/sources/0/class");
  d = base;
  d["sources"][1]["slice"] = "nope";
  CHECK(schema_path_of(d) == "/sources/1/slice");
  d = base;
  d["sources"][0]["attach"] = "mars";
  CHECK(schema_path_of(d) == "/sources/0/attach");
  d = base;
  d["sources"][3]["start"] = 1;  // its intent arrives at 5
  CHECK(schema_path_of(d) == "/sources/3/start");
  d = base;
  d["intents"][1]["id"] = "wams";
  CHECK(schema_path_of(d) == "/intents/1/id");
  d = base;
  d["intents"][0]["stakeholder"] = "MAYOR";
  CHECK(schema_path_of(d) == "/intents/0/stakeholder");
  d = base;
  d["faults"][2]["link"] = "nowhere";
  CHECK(schema_path_of(d) == "/faults/2/link");
  d = base;
  d["faults"][0]["source"] = "pmu-group-7";
  CHECK(schema_path_of(d) == "/faults/0/source");
  d = base;
  d["faults"][2]["loss_prob"] = 1.5;
  CHECK(schema_path_of(d) == "/faults/2/loss_prob");
  d = base;
  d["faults"][0]["at"] = 500;
  CHECK(schema_path_of(d) == "/faults/0/at");
  d = base;
  d["traffic_classes"]["TELEGRAPH"] = json::object();
  CHECK(schema_path_of(d) == "/traffic_classes/TELEGRAPH");
  d = base;
  d["sources"][0]["rate"] = 0;
  CHECK(schema_path_of(d) == "/sources/0/rate");
  d = base;
  d.erase("seed");
  CHECK(schema_path_of(d) == "/seed");
}

TEST_CASE("faults are sorted by time and round trip") {
  const auto sc = load_scenario_file(testing::data_path("scenarios/grid-mixed.json"));
  for (std::size_t i = 1; i < sc.faults.size(); ++i) CHECK(sc.faults[i - 1].at <= sc.faults[i].at);
  for (const auto& f : sc.faults) {
    const auto back = fault_from_json(to_json(f));
    CHECK(to_json(back) == to_json(f));
  }
}

TEST_CASE("AMI offered rate: ten thousand meters every fifteen minutes") {
  const auto sc = load_scenario_file(testing::data_path("scenarios/grid-mixed.json"));
  auto ami = *std::find_if(sc.sources.begin(), sc.sources.end(),
                           [](const TrafficSource& s) { return s.cls == TrafficClass::AmiMeter; });
  ami.devices = 10000;
  CHECK(ami.offered_rate() == doctest::Approx(10000.0 / 900.0).epsilon(1e-6));

  Rig r(testing::two_node_topology(), 3, SliceCategory::Mmtc);
  ami.rate = 1.0 / 900.0;
  ami.attach = "src";
  r.sim->start_source(ami, r.nsi, 0.0);
  CHECK(r.sim->offered_rate(ami.id) == doctest::Approx(11.111111));
  r.sim->advance(899.99);
  CHECK(r.samples.size() == 10000);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    CHECK(r.samples[i].t == doctest::Approx(static_cast<double>(i) * 900.0 / 10000.0));
  }
}

TEST_CASE("emission schedule and window counts") {
  Rig r(testing::two_node_topology());
  r.sim->start_source(pmu(), r.nsi, 0.0);
  const auto reports = r.sim->advance(20.0);
  REQUIRE(reports.size() == 4);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(reports[i].window_start == 5.0 * static_cast<double>(i));
    CHECK(reports[i].window_end == 5.0 * static_cast<double>(i + 1));
    CHECK(reports[i].sent == 2500);
    CHECK(reports[i].delivered == 2500);
    CHECK(reports[i].availability == 1.0);
    CHECK(reports[i].loss_rate == 0.0);
    // 2500 messages of 200 bytes over five seconds
    CHECK(reports[i].throughput_mbps == doctest::Approx(0.8));
    CHECK_FALSE(reports[i].deadline_miss_rate);
    REQUIRE(reports[i].p99_latency_ms);
  }
  CHECK(r.sim->now() == 20.0);
}

TEST_CASE("latency is path plus processing plus bounded jitter") {
  Rig r(testing::two_node_topology(2.0));
  r.sim->start_source(pmu(), r.nsi, 0.0);
  r.sim->advance(10.0);
  const auto& nsi = r.slices.get(r.nsi);
  const double floor = mano::path_latency(r.mano.infrastructure(), nsi.placement.path, nsi.chain);
  CHECK(floor >= 2.0);
  REQUIRE_FALSE(r.samples.empty());
  double lo = 1e9, hi = -1e9;
  for (const auto& s : r.samples) {
    lo = std::min(lo, s.latency_ms);
    hi = std::max(hi, s.latency_ms);
  }
  CHECK(lo >= floor);
  CHECK(hi < floor + r.params.base_jitter_ms);
  // with thousands of draws the jitter spans nearly its whole range
  CHECK(hi - lo > 0.99 * r.params.base_jitter_ms);
}

TEST_CASE("load above the threshold adds congestion delay") {
  // 1000 msg/s of 1000 bytes is 8 Mbps on a 10 Mbps link: utilisation 0.8 + 0.
  // Scaling to 1200 msg/s gives 0.96, i.e. (0.96 - 0.8) * 50 = 8 ms extra.
  Rig r(testing::two_node_topology(2.0, 10.0));
  auto s = pmu(20);
  s.payload_bytes = 1000;
  r.sim->start_source(s, r.nsi, 0.0);
  r.sim->advance(5.0);
  const auto& nsi = r.slices.get(r.nsi);
  const double floor = mano::path_latency(r.mano.infrastructure(), nsi.placement.path, nsi.chain);
  for (const auto& k : r.samples) CHECK(k.latency_ms < floor + 1.0 + 1e-9);

  r.samples.clear();
  r.sim->scale_source("pmu", 24);
  r.sim->advance(10.0);
  REQUIRE_FALSE(r.samples.empty());
  for (const auto& k : r.samples) {
    CHECK(k.latency_ms >= floor + 8.0 - 1e-9);
    CHECK(k.latency_ms < floor + 9.0 + 1e-9);
  }
}

TEST_CASE("same seed, same samples; another seed differs") {
  auto run = [](std::uint64_t seed) {
    Rig r(testing::two_node_topology(), seed);
    r.mano.inject_link_degradation("ab", 0.0, 0.1);
    r.sim->start_source(pmu(), r.nsi, 0.0);
    r.sim->advance(30.0);
    json out = json::array();
    for (const auto& s : r.samples) out.push_back(to_json(s));
    return out.dump();
  };
  CHECK(run(9) == run(9));
  CHECK(run(9) != run(10));
}

TEST_CASE("loss on the only link is binomial") {
  Rig r(testing::two_node_topology(), 77);
  r.mano.inject_link_degradation("ab", 0.0, 0.5);
  r.sim->start_source(pmu(), r.nsi, 0.0);
  const auto reports = r.sim->advance(120.0);
  std::int64_t sent = 0, delivered = 0;
  for (const auto& rep : reports) {
    sent += rep.sent;
    delivered += rep.delivered;
    CHECK(rep.sent == rep.delivered + rep.dropped);
    CHECK(rep.availability == doctest::Approx(1.0 - rep.loss_rate));
    // per-window: 2500 trials, four standard deviations is 0.04
    CHECK(std::abs(rep.availability - 0.5) < 0.04);
  }
  REQUIRE(sent == 60000);
  const double p = static_cast<double>(delivered) / static_cast<double>(sent);
  CHECK(std::abs(p - 0.5) < 4.0 * std::sqrt(0.25 / static_cast<double>(sent)));
}

TEST_CASE("delivery rate tracks the configured loss across a grid") {
  for (double loss : {0.0, 0.01, 0.1, 0.3, 0.9, 1.0}) {
    CAPTURE(loss);
    Rig r(testing::two_node_topology(), 5);
    r.mano.inject_link_degradation("ab", 0.0, loss);
    r.sim->start_source(pmu(), r.nsi, 0.0);
    std::int64_t sent = 0, delivered = 0;
    for (const auto& rep : r.sim->advance(60.0)) {
      sent += rep.sent;
      delivered += rep.delivered;
    }
    const double n = static_cast<double>(sent);
    const double sd = std::sqrt(loss * (1 - loss) / n);
    CHECK(std::abs(static_cast<double>(delivered) / n - (1.0 - loss)) <= 4.0 * sd + 1e-12);
  }
}

TEST_CASE("FLISR burst meets its deadline on a healthy path") {
  Rig r(testing::two_node_topology());
  r.sim->start_source(flisr(), r.nsi, 0.0);
  r.sim->trigger_flisr(7.0, "ied");
  const auto reports = r.sim->advance(15.0);
  REQUIRE(reports.size() == 3);
  CHECK_FALSE(reports[0].deadline_miss_rate);
  REQUIRE(reports[1].deadline_miss_rate);
  CHECK(*reports[1].deadline_miss_rate == 0.0);
  CHECK_FALSE(reports[2].deadline_miss_rate);
  // 20 devices at 1/s plus a 200-message burst
  CHECK(reports[1].sent == 100 + r.params.flisr_burst_size);
  const auto bursts = std::count_if(r.samples.begin(), r.samples.end(), [](const KpiSample& s) { return s.burst; });
  CHECK(bursts == r.params.flisr_burst_size);
  for (const auto& s : r.samples) {
    if (s.burst) {
      CHECK(s.t >= 7.0);
      CHECK(s.t < 7.0 + r.params.flisr_burst_span_s);
    }
  }
}

TEST_CASE("deadline miss rate is monotone in link degradation") {
  double prev = -1.0;
  for (double extra : {0.0, 1.0, 2.0, 4.0, 4.5, 5.0, 5.5, 6.0, 8.0, 20.0}) {
    CAPTURE(extra);
    Rig r(testing::two_node_topology(), 11);
    r.mano.inject_link_degradation("ab", extra, 0.0);
    r.sim->start_source(flisr(), r.nsi, 0.0);
    r.sim->trigger_flisr(1.0, "ied");
    const auto reports = r.sim->advance(5.0);
    REQUIRE(reports.size() == 1);
    REQUIRE(reports[0].deadline_miss_rate);
    const double miss = *reports[0].deadline_miss_rate;
    CHECK(miss >= prev);
    prev = miss;
    if (extra == 0.0) CHECK(miss == 0.0);
    if (extra == 20.0) CHECK(miss == 1.0);
  }
}

TEST_CASE("a dropped burst message counts as a miss") {
  Rig r(testing::two_node_topology(), 4);
  r.mano.inject_link_degradation("ab", 0.0, 1.0);
  r.sim->start_source(flisr(), r.nsi, 0.0);
  r.sim->trigger_flisr(0.5, "ied");
  const auto reports = r.sim->advance(5.0);
  REQUIRE(reports.size() == 1);
  CHECK(*reports[0].deadline_miss_rate == 1.0);
  CHECK(reports[0].delivered == 0);
  CHECK_FALSE(reports[0].p99_latency_ms);
  CHECK(reports[0].availability == 0.0);
}

TEST_CASE("nearest-rank p99") {
  CHECK(p99_nearest_rank({4.0}) == 4.0);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  CHECK(p99_nearest_rank(hundred) == 99.0);
  hundred.push_back(101);
  CHECK(p99_nearest_rank(hundred) == 100.0);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 400;
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng() % 50) / 4.0;  // ties on purpose
    CHECK(p99_nearest_rank(v) == p99_oracle(v));
  }
}

TEST_CASE("window p99 matches the samples in it") {
  Rig r(testing::two_node_topology(), 21);
  r.sim->start_source(pmu(), r.nsi, 0.0);
  const auto reports = r.sim->advance(10.0);
  REQUIRE(reports.size() == 2);
  for (const auto& rep : reports) {
    std::vector<double> lat;
    for (const auto& s : r.samples) {
      if (s.t >= rep.window_start && s.t < rep.window_end && s.delivered) lat.push_back(s.latency_ms);
    }
    REQUIRE(*rep.p99_latency_ms == p99_oracle(lat));
  }
}

TEST_CASE("windows before the first message are empty") {
  Rig r(testing::two_node_topology());
  r.sim->start_source(pmu(), r.nsi, 12.0);
  const auto reports = r.sim->advance(15.0);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].empty());
  CHECK(reports[1].empty());
  CHECK_FALSE(reports[0].p99_latency_ms);
  CHECK(reports[0].throughput_mbps == 0.0);
  CHECK(reports[0].availability == 0.0);
  CHECK(reports[2].sent == 1500);
}

TEST_CASE("flush closes a trailing partial window only when it saw traffic") {
  Rig r(testing::two_node_topology());
  r.sim->start_source(pmu(), r.nsi, 0.0);
  auto reports = r.sim->flush(7.5);
  REQUIRE(reports.size() == 2);
  CHECK(reports[1].window_start == 5.0);
  CHECK(reports[1].window_end == 7.5);
  CHECK(reports[1].sent == 1250);
  CHECK(reports[1].throughput_mbps == doctest::Approx(0.8));

  Rig quiet(testing::two_node_topology());
  CHECK(quiet.sim->flush(7.5).empty());
}

TEST_CASE("start and trigger preconditions") {
  Rig r(testing::two_node_topology());
  CHECK(code_of([&] { r.sim->start_source(pmu(), "nsi-404", 0.0); }) == ErrorCode::UnboundSource);
  r.sim->start_source(pmu(), r.nsi, 0.0);
  CHECK(code_of([&] { r.sim->start_source(pmu(), r.nsi, 0.0); }) == ErrorCode::DuplicateId);
  CHECK(code_of([&] { r.sim->trigger_flisr(1.0, "pmu"); }) == ErrorCode::UnboundSource);
  CHECK(code_of([&] { r.sim->trigger_flisr(1.0, "ied"); }) == ErrorCode::UnboundSource);
  CHECK(code_of([&] { r.sim->scale_source("ied", 3); }) == ErrorCode::UnboundSource);
  CHECK(code_of([&] { r.sim->scale_source("pmu", 0); }) == ErrorCode::SchemaError);
  CHECK(code_of([&] { r.sim->offered_rate("ied"); }) == ErrorCode::UnboundSource);

  Rig embb(testing::two_node_topology(), 1, SliceCategory::Embb);
  embb.sim->start_source(flisr(), embb.nsi, 0.0);
  CHECK(code_of([&] { embb.sim->trigger_flisr(1.0, "ied"); }) == ErrorCode::UnboundSource);

  Rig gone(testing::two_node_topology());
  gone.slices.terminate(gone.nsi);
  CHECK(code_of([&] { gone.sim->start_source(pmu(), gone.nsi, 0.0); }) == ErrorCode::UnboundSource);
}

TEST_CASE("a terminated slice falls silent") {
  Rig r(testing::two_node_topology());
  r.sim->start_source(pmu(), r.nsi, 0.0);
  r.sim->advance(5.0);
  const auto before = r.samples.size();
  r.slices.terminate(r.nsi);
  const auto reports = r.sim->advance(20.0);
  CHECK(r.samples.size() == before);
  CHECK(reports.empty());
}

TEST_CASE("scaling a source changes its rate from now on") {
  Rig r(testing::two_node_topology());
  r.sim->start_source(pmu(), r.nsi, 0.0);
  r.sim->advance(10.0);
  r.sim->scale_source("pmu", 20);
  CHECK(r.sim->offered_rate("pmu") == 1000.0);
  const auto reports = r.sim->advance(20.0);
  REQUIRE(reports.size() == 2);
  // the slot at the scaling instant belongs to the old schedule
  CHECK(reports[0].sent >= 4999);
  CHECK(reports[0].sent <= 5000);
  CHECK(reports[1].sent == 5000);
  for (std::size_t i = 1; i < r.samples.size(); ++i) CHECK(r.samples[i - 1].t <= r.samples[i].t);
}

TEST_CASE("lifting a degradation restores the baseline draw for draw") {
  auto run = [](bool degrade) {
    Rig r(testing::two_node_topology(), 33);
    r.sim->start_source(pmu(), r.nsi, 0.0);
    r.sim->advance(10.0);
    if (degrade) r.mano.inject_link_degradation("ab", 15.0, 0.0);
    r.sim->advance(20.0);
    if (degrade) r.mano.inject_link_degradation("ab", 0.0, 0.0);
    r.sim->advance(30.0);
    return r.samples;
  };
  const auto base = run(false);
  const auto hit = run(true);
  REQUIRE(base.size() == hit.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const bool during = base[i].t >= 10.0 && base[i].t < 20.0;
    if (during) {
      CHECK(hit[i].latency_ms == doctest::Approx(base[i].latency_ms + 15.0));
    } else {
      CHECK(hit[i].latency_ms == base[i].latency_ms);
    }
  }
}

TEST_CASE("reports round trip through JSON") {
  Rig r(testing::two_node_topology());
  r.sim->start_source(flisr(), r.nsi, 0.0);
  r.sim->trigger_flisr(1.0, "ied");
  auto reports = r.sim->advance(10.0);
  reports.push_back(KpiReport{});
  for (const auto& rep : reports) CHECK(report_from_json(to_json(rep)) == rep);
}
