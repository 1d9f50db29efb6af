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

#include "gridibn/mano.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace gridibn::mano {

using nlohmann::json;

const InfrastructureNode* Infrastructure::node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

InfrastructureNode* Infrastructure::node(const std::string& id) {
  for (auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const VirtualLink* Infrastructure::link(const std::string& id) const {
  for (const auto& l : links) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

VirtualLink* Infrastructure::link(const std::string& id) {
  for (auto& l : links) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

std::optional<std::size_t> Infrastructure::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  return std::nullopt;
}

Infrastructure topology_from_json(const json& doc) {
  Infrastructure infra;
  if (!doc.is_object()) throw SchemaError("", "topology must be an object");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw SchemaError("/nodes", "missing array");
  std::set<std::string> node_ids;
  std::size_t i = 0;
  for (const auto& n : doc["nodes"]) {
    const std::string path = "/nodes/" + std::to_string(i++);
    InfrastructureNode node;
    try {
      node.id = n.at("id").get<std::string>();
      node.location = n.value("location", "edge");
      node.capacity.cpu_milli = n.at("cpu_milli").get<std::int64_t>();
      node.capacity.memory_mb = n.at("memory_mb").get<std::int64_t>();
    } catch (const json::exception& e) {
      throw SchemaError(path, e.what());
    }
    if (!node_ids.insert(node.id).second) throw SchemaError(path + "/id", "duplicate node id");
    if (!node.capacity.non_negative()) throw SchemaError(path, "negative capacity");
    infra.nodes.push_back(std::move(node));
  }
  i = 0;
  std::set<std::string> link_ids;
  for (const auto& l : doc.value("links", json::array())) {
    const std::string path = "/links/" + std::to_string(i++);
    VirtualLink link;
    try {
      link.id = l.at("id").get<std::string>();
      link.a = l.at("a").get<std::string>();
      link.b = l.at("b").get<std::string>();
      link.capacity_kbps = mbps_to_kbps(l.at("capacity_mbps").get<double>());
      link.base_latency_ms = l.at("latency_ms").get<double>();
    } catch (const json::exception& e) {
      throw SchemaError(path, e.what());
    }
    if (!link_ids.insert(link.id).second) throw SchemaError(path + "/id", "duplicate link id");
    if (!node_ids.contains(link.a) || !node_ids.contains(link.b) || link.a == link.b) {
      throw SchemaError(path, "link endpoints must be two distinct known nodes");
    }
    if (!(link.base_latency_ms > 0)) throw SchemaError(path + "/latency_ms", "must be > 0");
    if (link.capacity_kbps <= 0) throw SchemaError(path + "/capacity_mbps", "must be > 0");
    infra.links.push_back(std::move(link));
  }
  const json endpoints = doc.value("endpoints", json::object());
  for (const auto& [ep, node] : endpoints.items()) {
    auto id = node.get<std::string>();
    if (!node_ids.contains(id)) throw SchemaError("/endpoints/" + ep, "unknown node '" + id + "'");
    infra.endpoints[ep] = id;
  }
  return infra;
}

namespace {

json vec_json(const ResourceVector& v) {
  return {{"cpu_milli", v.cpu_milli}, {"memory_mb", v.memory_mb}};
}

ResourceVector vec_from(const json& j) {
  return {j.at("cpu_milli").get<std::int64_t>(), j.at("memory_mb").get<std::int64_t>()};
}

}  // namespace

json to_json(const Infrastructure& infra) {
  json nodes = json::array();
  for (const auto& n : infra.nodes) {
    nodes.push_back({{"id", n.id},
                     {"location", n.location},
                     {"capacity", vec_json(n.capacity)},
                     {"usage", vec_json(n.usage)}});
  }
  json links = json::array();
  for (const auto& l : infra.links) {
    links.push_back({{"id", l.id},
                     {"a", l.a},
                     {"b", l.b},
                     {"capacity_kbps", l.capacity_kbps},
                     {"used_kbps", l.used_kbps},
                     {"base_latency_ms", l.base_latency_ms},
                     {"degradation_ms", l.degradation_ms},
                     {"loss_prob", l.loss_prob}});
  }
  return {{"nodes", nodes}, {"links", links}, {"endpoints", infra.endpoints},
          {"version", infra.version}};
}

Infrastructure infrastructure_from_json(const json& j) {
  Infrastructure infra;
  for (const auto& n : j.at("nodes")) {
    infra.nodes.push_back({n.at("id").get<std::string>(), n.at("location").get<std::string>(),
                           vec_from(n.at("capacity")), vec_from(n.at("usage"))});
  }
  for (const auto& l : j.at("links")) {
    VirtualLink link;
    link.id = l.at("id").get<std::string>();
    link.a = l.at("a").get<std::string>();
    link.b = l.at("b").get<std::string>();
    link.capacity_kbps = l.at("capacity_kbps").get<Kbps>();
    link.used_kbps = l.at("used_kbps").get<Kbps>();
    link.base_latency_ms = l.at("base_latency_ms").get<double>();
    link.degradation_ms = l.at("degradation_ms").get<double>();
    link.loss_prob = l.at("loss_prob").get<double>();
    infra.links.push_back(std::move(link));
  }
  infra.endpoints = j.at("endpoints").get<std::map<std::string, std::string>>();
  infra.version = j.at("version").get<std::uint64_t>();
  return infra;
}

ManoConfig ManoConfig::defaults() {
  ManoConfig c;
  c.vnf_types["forwarder"] = {{500, 256}, 100.0, 8.0, 0.0, 0.0, 0.5};
  c.vnf_types["aggregator"] = {{1000, 512}, 50.0, 4.0, 20.0, 16.0, 1.0};
  c.vnf_types["cache"] = {{1000, 2048}, 40.0, 32.0, 0.0, 0.0, 2.0};
  c.vnf_types["collector"] = {{500, 512}, 0.0, 0.0, 200.0, 64.0, 2.0};
  c.vnf_types["firewall"] = {{750, 512}, 60.0, 4.0, 0.0, 0.0, 0.8};
  c.chains[SliceCategory::Urllc] = {"forwarder", "aggregator"};
  c.chains[SliceCategory::Embb] = {"forwarder", "cache", "forwarder"};
  c.chains[SliceCategory::Mmtc] = {"collector", "aggregator"};
  return c;
}

ManoConfig ManoConfig::from_json(const json& j) {
  ManoConfig c;
  c.dedicated_factor = j.value("dedicated_factor", 1.5);
  c.exhaustive_limit = j.value("exhaustive_limit", std::uint64_t{10000});
  try {
    for (const auto& [name, t] : j.at("vnf_types").items()) {
      VnfType vt;
      vt.base = {t.at("cpu_milli").get<std::int64_t>(), t.at("memory_mb").get<std::int64_t>()};
      vt.cpu_milli_per_mbps = t.value("cpu_milli_per_mbps", 0.0);
      vt.memory_mb_per_mbps = t.value("memory_mb_per_mbps", 0.0);
      vt.cpu_milli_per_kdevice = t.value("cpu_milli_per_kdevice", 0.0);
      vt.memory_mb_per_kdevice = t.value("memory_mb_per_kdevice", 0.0);
      vt.processing_ms = t.at("processing_ms").get<double>();
      if (vt.base.cpu_milli <= 0 || vt.base.memory_mb <= 0) {
        throw SchemaError("/mano/vnf_types/" + name, "demand vector must be positive");
      }
      c.vnf_types[name] = vt;
    }
    for (const auto& [cat, chain] : j.at("chains").items()) {
      auto category = parse_category(cat);
      if (!category) throw SchemaError("/mano/chains/" + cat, "unknown slice type");
      auto names = chain.get<std::vector<std::string>>();
      for (const auto& n : names) {
        if (!c.vnf_types.contains(n)) throw SchemaError("/mano/chains/" + cat, "unknown VNF type " + n);
      }
      if (names.empty()) throw SchemaError("/mano/chains/" + cat, "empty chain");
      c.chains[*category] = names;
    }
  } catch (const json::exception& e) {
    throw SchemaError("/mano", e.what());
  }
  return c;
}

json ManoConfig::to_json() const {
  json types = json::object();
  for (const auto& [name, t] : vnf_types) {
    types[name] = {{"cpu_milli", t.base.cpu_milli},
                   {"memory_mb", t.base.memory_mb},
                   {"cpu_milli_per_mbps", t.cpu_milli_per_mbps},
                   {"memory_mb_per_mbps", t.memory_mb_per_mbps},
                   {"cpu_milli_per_kdevice", t.cpu_milli_per_kdevice},
                   {"memory_mb_per_kdevice", t.memory_mb_per_kdevice},
                   {"processing_ms", t.processing_ms}};
  }
  json chain_doc = json::object();
  for (const auto& [cat, names] : chains) chain_doc[std::string(gridibn::to_string(cat))] = names;
  return {{"dedicated_factor", dedicated_factor},
          {"exhaustive_limit", exhaustive_limit},
          {"vnf_types", types},
          {"chains", chain_doc}};
}

std::vector<VnfDescriptor> plan_chain(const ManoConfig& cfg, const Nest& nest) {
  std::vector<VnfDescriptor> chain;
  auto it = cfg.chains.find(nest.slice_type);
  if (it == cfg.chains.end()) return chain;
  const double bw = nest.guaranteed_bandwidth_mbps;
  const double kdev = static_cast<double>(nest.max_device_density) / 1000.0;
  const double factor = nest.isolation == Isolation::Dedicated ? cfg.dedicated_factor : 1.0;
  for (const auto& name : it->second) {
    const auto& t = cfg.vnf_types.at(name);
    const double cpu = static_cast<double>(t.base.cpu_milli) + t.cpu_milli_per_mbps * bw +
                       t.cpu_milli_per_kdevice * kdev;
    const double mem = static_cast<double>(t.base.memory_mb) + t.memory_mb_per_mbps * bw +
                       t.memory_mb_per_kdevice * kdev;
    chain.push_back({name,
                     {static_cast<std::int64_t>(std::llround(cpu * factor)),
                      static_cast<std::int64_t>(std::llround(mem * factor))},
                     t.processing_ms});
  }
  return chain;
}

std::vector<std::string> Placement::reserved_links() const {
  std::vector<std::string> out = path;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double path_latency(const Infrastructure& infra, const std::vector<std::string>& path,
                    const std::vector<VnfDescriptor>& chain) {
  double total = 0.0;
  for (const auto& id : path) {
    if (const auto* l = infra.link(id)) total += l->latency_ms();
  }
  for (const auto& v : chain) total += v.processing_ms;
  return total;
}

double path_loss(const Infrastructure& infra, const std::vector<std::string>& path) {
  std::vector<std::string> distinct = path;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double pass = 1.0;
  for (const auto& id : distinct) {
    if (const auto* l = infra.link(id)) pass *= 1.0 - l->loss_prob;
  }
  return 1.0 - pass;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Edge {
  std::size_t to;
  std::size_t link;
};

struct ShortestPaths {
  std::vector<double> dist;
  std::vector<std::optional<std::size_t>> via_link;  // link used to reach node
  std::vector<std::size_t> prev;
};

std::vector<std::vector<Edge>> usable_graph(const Infrastructure& infra, const PlacementRequest& req,
                                            bool ignore_capacity) {
  std::vector<std::vector<Edge>> adj(infra.nodes.size());
  for (std::size_t li = 0; li < infra.links.size(); ++li) {
    const auto& l = infra.links[li];
    if (req.excluded_links.contains(l.id)) continue;
    if (!ignore_capacity && l.residual_kbps() < req.bandwidth_kbps) continue;
    auto a = infra.node_index(l.a);
    auto b = infra.node_index(l.b);
    if (!a || !b) continue;
    adj[*a].push_back({*b, li});
    adj[*b].push_back({*a, li});
  }
  return adj;
}

ShortestPaths dijkstra(const Infrastructure& infra, const std::vector<std::vector<Edge>>& adj,
                       std::size_t src) {
  const auto n = adj.size();
  ShortestPaths sp{std::vector<double>(n, kInf), std::vector<std::optional<std::size_t>>(n),
                   std::vector<std::size_t>(n, src)};
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  sp.dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > sp.dist[u]) continue;
    for (const auto& e : adj[u]) {
      const double nd = d + infra.links[e.link].latency_ms();
      if (nd < sp.dist[e.to]) {
        sp.dist[e.to] = nd;
        sp.via_link[e.to] = e.link;
        sp.prev[e.to] = u;
        pq.push({nd, e.to});
      }
    }
  }
  return sp;
}

void append_path(const Infrastructure& infra, const ShortestPaths& sp, std::size_t src,
                 std::size_t dst, std::vector<std::string>& out) {
  std::vector<std::string> rev;
  for (auto v = dst; v != src; v = sp.prev[v]) rev.push_back(infra.links[*sp.via_link[v]].id);
  out.insert(out.end(), rev.rbegin(), rev.rend());
}

bool pow_within(std::size_t base, std::size_t exp, std::uint64_t limit) {
  std::uint64_t acc = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && acc > limit / base) return false;
    acc *= base;
  }
  return acc <= limit;
}

std::optional<Placement> exhaustive(const Infrastructure& infra, const PlacementRequest& req,
                                    const std::vector<std::vector<Edge>>& adj,
                                    const std::vector<std::size_t>& hosts, std::size_t ingress,
                                    std::size_t egress, bool ignore_capacity) {
  const auto n = infra.nodes.size();
  const auto k = req.chain.size();
  std::vector<ShortestPaths> sp;
  sp.reserve(n);
  for (std::size_t i = 0; i < n; ++i) sp.push_back(dijkstra(infra, adj, i));

  double processing = 0.0;
  for (const auto& v : req.chain) processing += v.processing_ms;

  std::vector<std::size_t> pick(k, 0);  // indices into hosts
  std::optional<std::vector<std::size_t>> best;
  double best_latency = kInf;
  std::vector<ResourceVector> load(n);

  while (true) {
    bool fits = true;
    if (!ignore_capacity) {
      std::fill(load.begin(), load.end(), ResourceVector{});
      for (std::size_t i = 0; i < k && fits; ++i) {
        const auto h = hosts[pick[i]];
        load[h] += req.chain[i].demand;
        fits = load[h].fits_within(infra.nodes[h].residual());
      }
    }
    if (fits) {
      double total = sp[ingress].dist[hosts[pick[0]]];
      for (std::size_t i = 0; i + 1 < k; ++i) total += sp[hosts[pick[i]]].dist[hosts[pick[i + 1]]];
      total += sp[hosts[pick[k - 1]]].dist[egress];
      total += processing;
      if (total < best_latency) {
        best_latency = total;
        std::vector<std::size_t> chosen(k);
        for (std::size_t i = 0; i < k; ++i) chosen[i] = hosts[pick[i]];
        best = std::move(chosen);
      }
    }
    // odometer increment, last position fastest
    bool done = true;
    for (std::size_t pos = k; pos-- > 0;) {
      if (++pick[pos] < hosts.size()) {
        done = false;
        break;
      }
      pick[pos] = 0;
    }
    if (done) break;
  }

  if (!best || best_latency > req.max_latency_ms) return std::nullopt;

  Placement p;
  std::size_t at = ingress;
  for (auto h : *best) {
    append_path(infra, sp[at], at, h, p.path);
    p.vnf_nodes.push_back(infra.nodes[h].id);
    at = h;
  }
  append_path(infra, sp[at], at, egress, p.path);
  p.latency_ms = best_latency;
  return p;
}

std::optional<Placement> greedy(const Infrastructure& infra, const PlacementRequest& req,
                                const std::vector<std::vector<Edge>>& adj, std::size_t ingress,
                                std::size_t egress, bool ignore_capacity) {
  auto sp = dijkstra(infra, adj, ingress);
  if (sp.dist[egress] == kInf) return std::nullopt;
  std::vector<std::size_t> along;
  for (auto v = egress;; v = sp.prev[v]) {
    along.push_back(v);
    if (v == ingress) break;
  }
  std::reverse(along.begin(), along.end());

  std::vector<ResourceVector> load(infra.nodes.size());
  Placement p;
  std::size_t pos = 0;
  for (const auto& vnf : req.chain) {
    bool placed = false;
    for (std::size_t q = pos; q < along.size(); ++q) {
      const auto h = along[q];
      if (req.excluded_nodes.contains(infra.nodes[h].id)) continue;
      if (!ignore_capacity && !(load[h] + vnf.demand).fits_within(infra.nodes[h].residual())) continue;
      load[h] += vnf.demand;
      p.vnf_nodes.push_back(infra.nodes[h].id);
      pos = q;
      placed = true;
      break;
    }
    if (!placed) return std::nullopt;
  }
  append_path(infra, sp, ingress, egress, p.path);
  p.latency_ms = path_latency(infra, p.path, req.chain);
  if (p.latency_ms > req.max_latency_ms) return std::nullopt;
  return p;
}

}  // namespace

std::optional<Placement> find_placement(const Infrastructure& infra, const PlacementRequest& req,
                                        const SearchOptions& opts) {
  if (infra.nodes.empty() || req.chain.empty()) return std::nullopt;
  auto ingress = infra.node_index(req.ingress);
  auto egress = infra.node_index(req.egress);
  if (!ingress || !egress) return std::nullopt;

  std::vector<std::size_t> hosts;
  for (std::size_t i = 0; i < infra.nodes.size(); ++i) {
    if (!req.excluded_nodes.contains(infra.nodes[i].id)) hosts.push_back(i);
  }
  if (hosts.empty()) return std::nullopt;

  const auto adj = usable_graph(infra, req, opts.ignore_capacity);
  if (pow_within(hosts.size(), req.chain.size(), opts.exhaustive_limit)) {
    return exhaustive(infra, req, adj, hosts, *ingress, *egress, opts.ignore_capacity);
  }
  return greedy(infra, req, adj, *ingress, *egress, opts.ignore_capacity);
}

Mano::Mano(ManoConfig cfg) : cfg_(std::move(cfg)) {}

void Mano::load_topology(Infrastructure infra) {
  if (!instances_.empty()) {
    throw Error(ErrorCode::IllegalState, "cannot replace topology while VNFs are deployed");
  }
  const auto v = infra_.version;
  infra_ = std::move(infra);
  infra_.version = v + 1;
}

Commitment Mano::place_chain(const PlacementRequest& req, PlaceMode mode) {
  auto placement = find_placement(infra_, req, {cfg_.exhaustive_limit, false});
  if (!placement) {
    throw Error(ErrorCode::NoFeasiblePlacement,
                "no feasible placement from " + req.ingress + " to " + req.egress);
  }
  Commitment c;
  c.placement = *placement;
  if (mode == PlaceMode::DryRun) return c;

  try {
    for (std::size_t i = 0; i < req.chain.size(); ++i) {
      auto inst = vnfm_deploy(req.chain[i], placement->vnf_nodes[i]);
      c.instance_ids.push_back(inst.id);
      c.node_allocations.emplace_back(inst.host, inst.descriptor.demand);
    }
    for (const auto& link : placement->reserved_links()) {
      vim_reserve_link(link, req.bandwidth_kbps);
      c.link_allocations.emplace_back(link, req.bandwidth_kbps);
    }
  } catch (...) {
    for (const auto& [link, kbps] : c.link_allocations) vim_release_link(link, kbps);
    for (const auto& id : c.instance_ids) vnfm_teardown(id);
    throw;
  }
  return c;
}

VnfInstance Mano::vnfm_deploy(const VnfDescriptor& descriptor, const std::string& node_id) {
  auto* node = infra_.node(node_id);
  if (!node) throw Error(ErrorCode::UnknownNode, "unknown node '" + node_id + "'");
  if (!(descriptor.demand.cpu_milli > 0 && descriptor.demand.memory_mb > 0)) {
    throw Error(ErrorCode::ResourceExhausted, "VNF demand must be positive");
  }
  if (!descriptor.demand.fits_within(node->residual())) {
    throw Error(ErrorCode::ResourceExhausted, "node '" + node_id + "' lacks capacity for " +
                                                  descriptor.type);
  }
  node->usage += descriptor.demand;
  VnfInstance inst{"vnf-" + std::to_string(next_instance_++), descriptor, node_id,
                   VnfState::Deployed};
  instances_.emplace(inst.id, inst);
  bump();
  return inst;
}

ResourceVector Mano::vnfm_teardown(const std::string& instance_id) {
  auto it = instances_.find(instance_id);
  if (it == instances_.end() || it->second.state != VnfState::Deployed) {
    throw Error(ErrorCode::UnknownInstance, "unknown VNF instance '" + instance_id + "'");
  }
  const auto demand = it->second.descriptor.demand;
  if (auto* node = infra_.node(it->second.host)) node->usage -= demand;
  instances_.erase(it);
  bump();
  return demand;
}

void Mano::vim_reserve_link(const std::string& link_id, Kbps kbps) {
  auto* l = infra_.link(link_id);
  if (!l) throw Error(ErrorCode::UnknownLink, "unknown link '" + link_id + "'");
  if (kbps < 0 || l->residual_kbps() < kbps) {
    throw Error(ErrorCode::ResourceExhausted, "link '" + link_id + "' lacks bandwidth");
  }
  l->used_kbps += kbps;
  bump();
}

void Mano::vim_release_link(const std::string& link_id, Kbps kbps) {
  auto* l = infra_.link(link_id);
  if (!l) throw Error(ErrorCode::UnknownLink, "unknown link '" + link_id + "'");
  if (kbps < 0 || l->used_kbps < kbps) {
    throw Error(ErrorCode::IllegalState, "release exceeds reservation on '" + link_id + "'");
  }
  l->used_kbps -= kbps;
  bump();
}

LinkFaultState Mano::inject_link_degradation(const std::string& link_id, double extra_latency_ms,
                                             double loss_prob) {
  auto* l = infra_.link(link_id);
  if (!l) throw Error(ErrorCode::UnknownLink, "unknown link '" + link_id + "'");
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
    throw Error(ErrorCode::SchemaError, "loss probability must lie in [0,1]");
  }
  if (!(extra_latency_ms >= 0.0) || !std::isfinite(extra_latency_ms)) {
    throw Error(ErrorCode::SchemaError, "extra latency must be finite and >= 0");
  }
  LinkFaultState prev{l->degradation_ms, l->loss_prob};
  l->degradation_ms = extra_latency_ms;
  l->loss_prob = loss_prob;
  bump();
  return prev;
}

std::string Mano::check_ledger() const {
  std::map<std::string, ResourceVector> expected;
  for (const auto& [id, inst] : instances_) {
    if (inst.state == VnfState::Deployed) expected[inst.host] += inst.descriptor.demand;
  }
  for (const auto& n : infra_.nodes) {
    if (!(n.usage == expected[n.id])) return "node " + n.id + " usage differs from deployed demand";
    if (!n.usage.non_negative()) return "node " + n.id + " usage negative";
    if (!n.usage.fits_within(n.capacity)) return "node " + n.id + " usage exceeds capacity";
  }
  for (const auto& l : infra_.links) {
    if (l.used_kbps < 0) return "link " + l.id + " usage negative";
    if (l.used_kbps > l.capacity_kbps) return "link " + l.id + " usage exceeds capacity";
  }
  return {};
}

json Mano::to_json() const {
  json inst = json::array();
  for (const auto& [id, i] : instances_) {
    inst.push_back({{"id", i.id},
                    {"type", i.descriptor.type},
                    {"demand", vec_json(i.descriptor.demand)},
                    {"processing_ms", i.descriptor.processing_ms},
                    {"host", i.host},
                    {"state", i.state == VnfState::Deployed ? "Deployed" : "Down"}});
  }
  return {{"infrastructure", mano::to_json(infra_)},
          {"instances", inst},
          {"next_instance", next_instance_}};
}

void Mano::restore(const json& j) {
  infra_ = infrastructure_from_json(j.at("infrastructure"));
  instances_.clear();
  for (const auto& i : j.at("instances")) {
    VnfInstance inst;
    inst.id = i.at("id").get<std::string>();
    inst.descriptor = {i.at("type").get<std::string>(), vec_from(i.at("demand")),
                       i.at("processing_ms").get<double>()};
    inst.host = i.at("host").get<std::string>();
    inst.state = i.at("state").get<std::string>() == "Deployed" ? VnfState::Deployed : VnfState::Down;
    instances_.emplace(inst.id, inst);
  }
  next_instance_ = j.at("next_instance").get<std::uint64_t>();
}

}  // namespace gridibn::mano
