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

// Simulated NFV management and orchestration. The VIM keeps the capacity
// ledger for nodes and virtual links, the VNFM deploys and tears down VNF
// instances against it, and the NFVO plans chains and places them.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridibn/common.hpp"
#include "gridibn/nest.hpp"
#include "json.hpp"

namespace gridibn::mano {

struct InfrastructureNode {
  std::string id;
  std::string location;  // edge, regional, core
  ResourceVector capacity;
  ResourceVector usage;

  ResourceVector residual() const { return capacity - usage; }
  friend bool operator==(const InfrastructureNode&, const InfrastructureNode&) = default;
};

struct VirtualLink {
  std::string id;
  std::string a;
  std::string b;
  Kbps capacity_kbps = 0;
  Kbps used_kbps = 0;
  double base_latency_ms = 0.0;
  double degradation_ms = 0.0;
  double loss_prob = 0.0;

  double latency_ms() const { return base_latency_ms + degradation_ms; }
  Kbps residual_kbps() const { return capacity_kbps - used_kbps; }
  const std::string& other(const std::string& end) const { return end == a ? b : a; }
  friend bool operator==(const VirtualLink&, const VirtualLink&) = default;
};

/// Nodes, links and endpoint attachments. Node and link order is the order of
/// the topology document and is used for deterministic tie-breaking.
struct Infrastructure {
  std::vector<InfrastructureNode> nodes;
  std::vector<VirtualLink> links;
  std::map<std::string, std::string> endpoints;  // endpoint id -> node id
  std::uint64_t version = 0;

  const InfrastructureNode* node(const std::string& id) const;
  InfrastructureNode* node(const std::string& id);
  const VirtualLink* link(const std::string& id) const;
  VirtualLink* link(const std::string& id);
  std::optional<std::size_t> node_index(const std::string& id) const;

  friend bool operator==(const Infrastructure&, const Infrastructure&) = default;
};

/// Versioned, immutable copy of the VIM state.
using ResourceSnapshot = Infrastructure;

/// Parses a topology document. Usage and reservations start at zero.
Infrastructure topology_from_json(const nlohmann::json& doc);
/// Full ledger rendering, including usage and degradation.
nlohmann::json to_json(const Infrastructure& infra);
Infrastructure infrastructure_from_json(const nlohmann::json& j);

struct VnfDescriptor {
  std::string type;
  ResourceVector demand;
  double processing_ms = 0.0;

  friend bool operator==(const VnfDescriptor&, const VnfDescriptor&) = default;
};

enum class VnfState { Deployed, Down };

struct VnfInstance {
  std::string id;
  VnfDescriptor descriptor;
  std::string host;
  VnfState state = VnfState::Deployed;

  friend bool operator==(const VnfInstance&, const VnfInstance&) = default;
};

/// Demand law for one VNF type: base plus per-Mbps and per-1000-device terms.
struct VnfType {
  ResourceVector base;
  double cpu_milli_per_mbps = 0.0;
  double memory_mb_per_mbps = 0.0;
  double cpu_milli_per_kdevice = 0.0;
  double memory_mb_per_kdevice = 0.0;
  double processing_ms = 0.0;
};

struct ManoConfig {
  std::map<std::string, VnfType> vnf_types;
  std::map<SliceCategory, std::vector<std::string>> chains;
  /// Demand multiplier for dedicated isolation.
  double dedicated_factor = 1.5;
  /// Exhaustive search when |nodes|^|chain| does not exceed this.
  std::uint64_t exhaustive_limit = 10000;

  static ManoConfig defaults();
  static ManoConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Chain planning: fixed chain per slice type, demands scaled by the NEST.
std::vector<VnfDescriptor> plan_chain(const ManoConfig& cfg, const Nest& nest);

struct PlacementRequest {
  std::vector<VnfDescriptor> chain;
  std::string ingress;  // node ids
  std::string egress;
  double max_latency_ms = 0.0;
  Kbps bandwidth_kbps = 0;
  std::set<std::string> excluded_links;
  std::set<std::string> excluded_nodes;
};

struct Placement {
  std::vector<std::string> vnf_nodes;  // host per chain position
  std::vector<std::string> path;       // link walk ingress -> ... -> egress
  double latency_ms = 0.0;

  /// Distinct links of the walk; bandwidth is reserved once per link.
  std::vector<std::string> reserved_links() const;
  friend bool operator==(const Placement&, const Placement&) = default;
};

struct SearchOptions {
  std::uint64_t exhaustive_limit = 10000;
  /// Treat every node and link as having unbounded residual capacity.
  bool ignore_capacity = false;
};

/// Minimum-latency feasible placement or nullopt. Exhaustive over node
/// assignments below the limit, greedy first-fit along the shortest-latency
/// path above it.
std::optional<Placement> find_placement(const Infrastructure& infra, const PlacementRequest& req,
                                        const SearchOptions& opts = {});

/// Sum of link latencies along the walk plus chain processing latency.
double path_latency(const Infrastructure& infra, const std::vector<std::string>& path,
                    const std::vector<VnfDescriptor>& chain);

/// 1 - prod(1 - loss) over the distinct links of the walk.
double path_loss(const Infrastructure& infra, const std::vector<std::string>& path);

enum class PlaceMode { DryRun, Commit };

struct Commitment {
  Placement placement;
  std::vector<std::string> instance_ids;
  std::vector<std::pair<std::string, ResourceVector>> node_allocations;
  std::vector<std::pair<std::string, Kbps>> link_allocations;
};

struct LinkFaultState {
  double degradation_ms = 0.0;
  double loss_prob = 0.0;
};

class Mano {
 public:
  explicit Mano(ManoConfig cfg = ManoConfig::defaults());

  const ManoConfig& config() const { return cfg_; }

  /// Replaces the infrastructure. Throws IllegalState while VNFs are deployed.
  void load_topology(Infrastructure infra);

  std::vector<VnfDescriptor> nfvo_plan(const Nest& nest) const { return plan_chain(cfg_, nest); }

  /// Places a chain on the current ledger. Commit mode deploys the VNFs and
  /// reserves link bandwidth atomically. Throws NoFeasiblePlacement.
  Commitment place_chain(const PlacementRequest& req, PlaceMode mode);

  /// Throws UnknownNode or ResourceExhausted (usage unchanged).
  VnfInstance vnfm_deploy(const VnfDescriptor& descriptor, const std::string& node_id);
  /// Returns the released demand. Throws UnknownInstance.
  ResourceVector vnfm_teardown(const std::string& instance_id);

  /// Throws UnknownLink or ResourceExhausted.
  void vim_reserve_link(const std::string& link_id, Kbps kbps);
  void vim_release_link(const std::string& link_id, Kbps kbps);

  ResourceSnapshot vim_snapshot() const { return infra_; }

  /// Sets the link's additive latency and loss probability; returns the
  /// previous values. Throws UnknownLink, or Error(SchemaError) for a loss
  /// probability outside [0,1].
  LinkFaultState inject_link_degradation(const std::string& link_id, double extra_latency_ms,
                                         double loss_prob);

  const Infrastructure& infrastructure() const { return infra_; }
  const std::map<std::string, VnfInstance>& instances() const { return instances_; }
  std::uint64_t version() const { return infra_.version; }
  std::uint64_t next_instance_seq() const { return next_instance_; }

  /// Node usage equals the sum of deployed demands and stays within capacity;
  /// link usage stays within capacity. Returns a description of the first
  /// violation, or empty.
  std::string check_ledger() const;

  nlohmann::json to_json() const;
  void restore(const nlohmann::json& j);

 private:
  void bump() { ++infra_.version; }

  ManoConfig cfg_;
  Infrastructure infra_;
  std::map<std::string, VnfInstance> instances_;
  std::uint64_t next_instance_ = 1;
};

}  // namespace gridibn::mano
