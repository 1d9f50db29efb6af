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

#include "gridibn/slice_orchestrator.hpp"

#include <algorithm>

namespace gridibn::slice {

using nlohmann::json;

std::string_view to_string(NsiState s) {
  switch (s) {
    case NsiState::Requested: return "Requested";
    case NsiState::Instantiating: return "Instantiating";
    case NsiState::Active: return "Active";
    case NsiState::Updating: return "Updating";
    case NsiState::Degraded: return "Degraded";
    case NsiState::Terminating: return "Terminating";
    case NsiState::Terminated: return "Terminated";
  }
  return "?";
}

std::optional<NsiState> parse_nsi_state(std::string_view s) {
  for (auto st : kAllNsiStates) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

bool check_transition(NsiState from, NsiState to) {
  using S = NsiState;
  switch (from) {
    case S::Requested: return to == S::Instantiating;
    case S::Instantiating: return to == S::Active || to == S::Terminating;
    case S::Active: return to == S::Updating || to == S::Degraded || to == S::Terminating;
    case S::Updating: return to == S::Active || to == S::Terminating;
    case S::Degraded: return to == S::Updating || to == S::Terminating;
    case S::Terminating: return to == S::Terminated;
    case S::Terminated: return false;
  }
  return false;
}

namespace {

json vec_json(const ResourceVector& v) {
  return {{"cpu_milli", v.cpu_milli}, {"memory_mb", v.memory_mb}};
}

ResourceVector vec_from(const json& j) {
  return {j.at("cpu_milli").get<std::int64_t>(), j.at("memory_mb").get<std::int64_t>()};
}

}  // namespace

json to_json(const NetworkSliceInstance& nsi) {
  json chain = json::array();
  for (const auto& v : nsi.chain) {
    chain.push_back({{"type", v.type}, {"demand", vec_json(v.demand)}, {"processing_ms", v.processing_ms}});
  }
  json nodes = json::array();
  for (const auto& a : nsi.node_allocations) {
    nodes.push_back({{"instance_id", a.instance_id}, {"node", a.node}, {"demand", vec_json(a.demand)}});
  }
  json links = json::array();
  for (const auto& a : nsi.link_allocations) links.push_back({{"link", a.link}, {"kbps", a.kbps}});
  return {{"id", nsi.id},
          {"nest", gridibn::to_json(nsi.nest)},
          {"state", std::string(to_string(nsi.state))},
          {"ingress", nsi.ingress},
          {"egress", nsi.egress},
          {"chain", chain},
          {"vnf_chain", nsi.vnf_chain},
          {"placement",
           {{"vnf_nodes", nsi.placement.vnf_nodes},
            {"path", nsi.placement.path},
            {"latency_ms", nsi.placement.latency_ms}}},
          {"allocations", {{"nodes", nodes}, {"links", links}}},
          {"created_at", nsi.created_at},
          {"updated_at", nsi.updated_at},
          {"failure_reason", nsi.failure_reason}};
}

NetworkSliceInstance nsi_from_json(const json& j) {
  NetworkSliceInstance n;
  n.id = j.at("id").get<std::string>();
  n.nest = nest_from_json(j.at("nest"));
  n.state = parse_nsi_state(j.at("state").get<std::string>()).value();
  n.ingress = j.at("ingress").get<std::string>();
  n.egress = j.at("egress").get<std::string>();
  for (const auto& v : j.at("chain")) {
    n.chain.push_back({v.at("type").get<std::string>(), vec_from(v.at("demand")),
                       v.at("processing_ms").get<double>()});
  }
  n.vnf_chain = j.at("vnf_chain").get<std::vector<std::string>>();
  const auto& p = j.at("placement");
  n.placement.vnf_nodes = p.at("vnf_nodes").get<std::vector<std::string>>();
  n.placement.path = p.at("path").get<std::vector<std::string>>();
  n.placement.latency_ms = p.at("latency_ms").get<double>();
  for (const auto& a : j.at("allocations").at("nodes")) {
    n.node_allocations.push_back({a.at("instance_id").get<std::string>(),
                                  a.at("node").get<std::string>(), vec_from(a.at("demand"))});
  }
  for (const auto& a : j.at("allocations").at("links")) {
    n.link_allocations.push_back({a.at("link").get<std::string>(), a.at("kbps").get<Kbps>()});
  }
  n.created_at = j.at("created_at").get<double>();
  n.updated_at = j.at("updated_at").get<double>();
  n.failure_reason = j.at("failure_reason").get<std::string>();
  return n;
}

SliceOrchestrator::SliceOrchestrator(mano::Mano& mano, LifecycleSink sink,
                                     std::function<SimTime()> clock)
    : mano_(mano), sink_(std::move(sink)), clock_(std::move(clock)) {}

NetworkSliceInstance& SliceOrchestrator::mut(const std::string& id) {
  auto it = nsis_.find(id);
  if (it == nsis_.end()) throw Error(ErrorCode::UnknownId, "unknown slice '" + id + "'");
  return it->second;
}

const NetworkSliceInstance* SliceOrchestrator::find(const std::string& id) const {
  auto it = nsis_.find(id);
  return it == nsis_.end() ? nullptr : &it->second;
}

const NetworkSliceInstance& SliceOrchestrator::get(const std::string& id) const {
  if (const auto* n = find(id)) return *n;
  throw Error(ErrorCode::UnknownId, "unknown slice '" + id + "'");
}

void SliceOrchestrator::transition(NetworkSliceInstance& nsi, NsiState to, const std::string& reason) {
  if (!check_transition(nsi.state, to)) {
    throw Error(ErrorCode::IllegalState, "slice " + nsi.id + ": illegal transition " +
                                             std::string(to_string(nsi.state)) + " -> " +
                                             std::string(to_string(to)));
  }
  const auto from = nsi.state;
  nsi.state = to;
  nsi.updated_at = now();
  if (sink_) sink_({nsi.updated_at, nsi.id, from, to, reason});
}

void SliceOrchestrator::release(NetworkSliceInstance& nsi) {
  for (const auto& a : nsi.link_allocations) mano_.vim_release_link(a.link, a.kbps);
  for (const auto& a : nsi.node_allocations) mano_.vnfm_teardown(a.instance_id);
  nsi.link_allocations.clear();
  nsi.node_allocations.clear();
  nsi.vnf_chain.clear();
}

void SliceOrchestrator::raise_placement_error(const mano::PlacementRequest& req,
                                              const std::string& context) const {
  const bool capacity_bound = mano::find_placement(mano_.infrastructure(), req,
                                                   {mano_.config().exhaustive_limit, true})
                                  .has_value();
  if (capacity_bound) {
    throw Error(ErrorCode::ResourceExhausted, context + ": insufficient residual capacity");
  }
  throw Error(ErrorCode::PlacementFailed, context + ": no placement meets the latency bound");
}

const NetworkSliceInstance& SliceOrchestrator::request(const Nest& nest, const std::string& ingress,
                                                       const std::string& egress) {
  NetworkSliceInstance nsi;
  nsi.id = "nsi-" + std::to_string(next_seq_++);
  nsi.nest = nest;
  nsi.ingress = ingress;
  nsi.egress = egress;
  nsi.created_at = nsi.updated_at = now();
  nsi.state = NsiState::Requested;
  auto [it, inserted] = nsis_.emplace(nsi.id, std::move(nsi));
  if (sink_) sink_({it->second.created_at, it->second.id, std::nullopt, NsiState::Requested, "requested"});
  return it->second;
}

const NetworkSliceInstance& SliceOrchestrator::realize(const std::string& id) {
  auto& nsi = mut(id);
  if (nsi.state != NsiState::Requested) {
    throw Error(ErrorCode::IllegalState, "slice " + id + " is not Requested");
  }
  transition(nsi, NsiState::Instantiating);

  mano::PlacementRequest req;
  req.chain = mano_.nfvo_plan(nsi.nest);
  req.ingress = nsi.ingress;
  req.egress = nsi.egress;
  req.max_latency_ms = nsi.nest.max_latency_ms;
  req.bandwidth_kbps = mbps_to_kbps(nsi.nest.guaranteed_bandwidth_mbps);

  try {
    if (req.chain.empty()) {
      throw Error(ErrorCode::PlacementFailed, "no chain defined for slice type");
    }
    mano::Commitment c;
    try {
      c = mano_.place_chain(req, mano::PlaceMode::Commit);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFeasiblePlacement) throw;
      raise_placement_error(req, "slice " + id);
    }
    nsi.chain = req.chain;
    nsi.placement = c.placement;
    nsi.vnf_chain = c.instance_ids;
    for (std::size_t i = 0; i < c.instance_ids.size(); ++i) {
      nsi.node_allocations.push_back(
          {c.instance_ids[i], c.node_allocations[i].first, c.node_allocations[i].second});
    }
    for (const auto& [link, kbps] : c.link_allocations) nsi.link_allocations.push_back({link, kbps});
  } catch (const Error& e) {
    release(nsi);
    nsi.failure_reason = std::string(to_string(e.code())) + ": " + e.what();
    transition(nsi, NsiState::Terminating, nsi.failure_reason);
    transition(nsi, NsiState::Terminated, nsi.failure_reason);
    throw;
  }
  transition(nsi, NsiState::Active, "instantiated");
  return nsi;
}

const NetworkSliceInstance& SliceOrchestrator::instantiate(const Nest& nest, const std::string& ingress,
                                                           const std::string& egress) {
  const auto id = request(nest, ingress, egress).id;
  return realize(id);
}

const NetworkSliceInstance& SliceOrchestrator::update(const std::string& id, const Nest& new_nest,
                                                      const UpdateOptions& opts) {
  auto& nsi = mut(id);
  if (nsi.state != NsiState::Active && nsi.state != NsiState::Degraded) {
    throw Error(ErrorCode::IllegalState, "slice " + id + " is " + std::string(to_string(nsi.state)) +
                                             "; update needs Active or Degraded");
  }

  mano::PlacementRequest req;
  req.chain = mano_.nfvo_plan(new_nest);
  req.ingress = nsi.ingress;
  req.egress = nsi.egress;
  req.max_latency_ms = new_nest.max_latency_ms;
  req.bandwidth_kbps = mbps_to_kbps(new_nest.guaranteed_bandwidth_mbps);
  req.excluded_links = opts.excluded_links;
  req.excluded_nodes = opts.excluded_nodes;

  // Make: reserve the new chain next to the old one.
  mano::Commitment c;
  try {
    c = mano_.place_chain(req, mano::PlaceMode::Commit);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoFeasiblePlacement) throw;
    raise_placement_error(req, "update of slice " + id);
  }

  transition(nsi, NsiState::Updating, "make-before-break");
  // Break: release the old chain.
  release(nsi);
  nsi.nest = new_nest;
  nsi.chain = req.chain;
  nsi.placement = c.placement;
  nsi.vnf_chain = c.instance_ids;
  for (std::size_t i = 0; i < c.instance_ids.size(); ++i) {
    nsi.node_allocations.push_back(
        {c.instance_ids[i], c.node_allocations[i].first, c.node_allocations[i].second});
  }
  for (const auto& [link, kbps] : c.link_allocations) nsi.link_allocations.push_back({link, kbps});
  transition(nsi, NsiState::Active, "updated");
  return nsi;
}

const NetworkSliceInstance& SliceOrchestrator::terminate(const std::string& id) {
  auto& nsi = mut(id);
  switch (nsi.state) {
    case NsiState::Terminated:
      throw Error(ErrorCode::IllegalState, "slice " + id + " already Terminated");
    case NsiState::Requested:
      // Nothing was deployed: walk the legal path without MANO calls.
      transition(nsi, NsiState::Instantiating, "terminate before realization");
      transition(nsi, NsiState::Terminating, "terminate before realization");
      break;
    default:
      transition(nsi, NsiState::Terminating, "terminate");
      release(nsi);
      break;
  }
  transition(nsi, NsiState::Terminated, "terminated");
  return nsi;
}

void SliceOrchestrator::mark_degraded(const std::string& id, const std::string& reason) {
  auto& nsi = mut(id);
  if (nsi.state == NsiState::Degraded) return;
  transition(nsi, NsiState::Degraded, reason);
}

void SliceOrchestrator::forget(const std::string& id) {
  auto it = nsis_.find(id);
  if (it == nsis_.end()) return;
  if (it->second.state != NsiState::Terminated) {
    throw Error(ErrorCode::IllegalState, "only Terminated slices can be dropped");
  }
  nsis_.erase(it);
}

std::string SliceOrchestrator::check_ledger() const {
  std::map<std::string, ResourceVector> node_sum;
  std::map<std::string, Kbps> link_sum;
  for (const auto& [id, nsi] : nsis_) {
    if (nsi.state == NsiState::Terminated &&
        (!nsi.node_allocations.empty() || !nsi.link_allocations.empty() || !nsi.vnf_chain.empty())) {
      return "terminated slice " + id + " still holds allocations";
    }
    for (const auto& a : nsi.node_allocations) node_sum[a.node] += a.demand;
    for (const auto& a : nsi.link_allocations) link_sum[a.link] += a.kbps;
  }
  const auto& infra = mano_.infrastructure();
  for (const auto& n : infra.nodes) {
    if (!(node_sum[n.id] == n.usage)) return "node " + n.id + ": slice allocations differ from VIM usage";
  }
  for (const auto& l : infra.links) {
    if (link_sum[l.id] != l.used_kbps) return "link " + l.id + ": slice allocations differ from VIM usage";
  }
  return mano_.check_ledger();
}

json SliceOrchestrator::to_json() const {
  json list = json::array();
  for (const auto& [id, nsi] : nsis_) list.push_back(slice::to_json(nsi));
  return {{"slices", list}, {"next_seq", next_seq_}};
}

void SliceOrchestrator::restore(const json& j) {
  nsis_.clear();
  for (const auto& n : j.at("slices")) {
    auto nsi = nsi_from_json(n);
    nsis_.emplace(nsi.id, std::move(nsi));
  }
  next_seq_ = j.at("next_seq").get<std::uint64_t>();
}

}  // namespace gridibn::slice
