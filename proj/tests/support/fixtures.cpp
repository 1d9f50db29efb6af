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

#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gridibn::testing {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path data_path(const std::string& rel) { return fs::path(GRIDIBN_DATA_DIR) / rel; }
fs::path docs_path(const std::string& rel) { return fs::path(GRIDIBN_DOCS_DIR) / rel; }
fs::path golden_path(const std::string& rel) { return fs::path(GRIDIBN_GOLDEN_DIR) / rel; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const fs::path& p) { return json::parse(read_text(p)); }

api::ServiceConfig shipped_config() { return api::ServiceConfig::load(data_path("config.json")); }

api::ServiceConfig config_with_topology(const json& topology) {
  auto cfg = shipped_config();
  cfg.topology = topology;
  return cfg;
}

mano::Infrastructure reference_topology() {
  return mano::topology_from_json(read_json(data_path("topology/reference.json")));
}

mano::Infrastructure random_topology(std::mt19937_64& rng, std::size_t n, double extra_link_prob,
                                     std::int64_t max_cpu, std::int64_t max_mem, double max_link_mbps) {
  std::uniform_int_distribution<std::int64_t> cpu(max_cpu / 8, max_cpu);
  std::uniform_int_distribution<std::int64_t> mem(max_mem / 8, max_mem);
  std::uniform_int_distribution<int> quarter_ms(1, 24);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> mbps(1, static_cast<int>(max_link_mbps));

  mano::Infrastructure infra;
  for (std::size_t i = 0; i < n; ++i) {
    mano::InfrastructureNode node;
    node.id = "n" + std::to_string(i);
    node.location = i == 0 ? "edge" : "core";
    node.capacity = {cpu(rng), mem(rng)};
    infra.nodes.push_back(node);
  }
  auto add_link = [&](std::size_t a, std::size_t b) {
    mano::VirtualLink l;
    l.id = "l" + std::to_string(a) + "-" + std::to_string(b);
    l.a = infra.nodes[a].id;
    l.b = infra.nodes[b].id;
    l.capacity_kbps = mbps_to_kbps(mbps(rng));
    l.base_latency_ms = 0.25 * quarter_ms(rng);
    infra.links.push_back(l);
  };
  // random spanning tree, then extra chords
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    add_link(parent(rng), i);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      bool exists = false;
      for (const auto& l : infra.links) {
        exists = exists || (l.a == infra.nodes[a].id && l.b == infra.nodes[b].id);
      }
      if (!exists && coin(rng) < extra_link_prob) add_link(a, b);
    }
  }
  return infra;
}

json two_node_topology(double latency_ms, double capacity_mbps) {
  return {{"schema", "gridibn.topology/1"},
          {"nodes",
           {{{"id", "a"}, {"cpu_milli", 64000}, {"memory_mb", 131072}},
            {{"id", "b"}, {"cpu_milli", 64000}, {"memory_mb", 131072}}}},
          {"links",
           {{{"id", "ab"}, {"a", "a"}, {"b", "b"}, {"capacity_mbps", capacity_mbps}, {"latency_ms", latency_ms}}}},
          {"endpoints", {{"src", "a"}, {"dst", "b"}}}};
}

intent::IntentAst random_ast(std::mt19937_64& rng) {
  using namespace intent;
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto coin = [&] { return pick(2) == 0; };

  auto ident = [&] {
    static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    static const std::string rest = first + "0123456789-_.";
    std::string s;
    do {
      s = std::string(1, first[pick(first.size())]);
      const auto len = pick(12);
      for (std::size_t i = 0; i < len; ++i) s += rest[pick(rest.size())];
    } while (is_reserved_word(s));
    return s;
  };
  auto value = [&]() -> double {
    switch (pick(4)) {
      case 0: return static_cast<double>(pick(100000));
      case 1: return static_cast<double>(pick(100000)) / 1000.0;
      case 2: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
      default: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1.0)(rng),
                                 static_cast<int>(pick(80)) - 40);
    }
  };

  IntentAst a;
  a.verb = static_cast<Verb>(pick(5));
  a.subject = ident();
  if (a.verb == Verb::Connect || coin()) a.target = ident();
  if (coin()) a.application = static_cast<Application>(pick(4));
  for (auto k : {Kpi::Latency, Kpi::Reliability, Kpi::Bandwidth, Kpi::Devices}) {
    if (!coin()) continue;
    const auto& cmps = comparators_for(k);
    const auto& units = units_for(k);
    a.kpi_clauses.push_back({k, cmps[pick(cmps.size())], value(), units[pick(units.size())], 0});
  }
  a.stakeholder = static_cast<Stakeholder>(pick(4));
  return a;
}

namespace {

std::vector<DocumentedError> table_after(const std::string& heading, bool with_position) {
  const auto doc = read_text(docs_path("intent-grammar.md"));
  auto at = doc.find(heading);
  if (at == std::string::npos) throw std::runtime_error("heading not found: " + heading);
  std::istringstream in(doc.substr(at + heading.size()));
  std::vector<DocumentedError> out;
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    if (line.rfind("| `", 0) != 0) {
      if (in_table && line.rfind("|", 0) != 0) break;
      continue;
    }
    in_table = true;
    const auto close = line.find("` |", 3);
    DocumentedError e;
    e.input = line.substr(3, close - 3);
    std::vector<std::string> cols;
    std::istringstream rest(line.substr(close + 3));
    std::string col;
    while (std::getline(rest, col, '|')) {
      const auto b = col.find_first_not_of(' ');
      const auto t = col.find_last_not_of(' ');
      cols.push_back(b == std::string::npos ? "" : col.substr(b, t - b + 1));
    }
    if (with_position) {
      e.position = std::stoul(cols.at(0));
      e.code = cols.at(1);
    } else {
      e.code = cols.at(0);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

std::vector<DocumentedError> documented_parse_errors() { return table_after("## Error cases", true); }

std::vector<DocumentedError> documented_translation_errors() {
  return table_after("Inputs that parse but fail translation:", false);
}

}  // namespace gridibn::testing
