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

#include <array>
#include <functional>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridibn/common.hpp"
#include "gridibn/mano.hpp"
#include "gridibn/nest.hpp"
#include "json.hpp"

namespace gridibn::slice {

enum class NsiState { Requested, Instantiating, Active, Updating, Degraded, Terminating, Terminated };

inline constexpr std::array kAllNsiStates = {
    NsiState::Requested, NsiState::Instantiating, NsiState::Active,     NsiState::Updating,
    NsiState::Degraded,  NsiState::Terminating,   NsiState::Terminated};

std::string_view to_string(NsiState s);
std::optional<NsiState> parse_nsi_state(std::string_view s);

/// True iff (from, to) is a legal lifecycle transition.
bool check_transition(NsiState from, NsiState to);

struct NodeAllocation {
  std::string instance_id;
  std::string node;
  ResourceVector demand;
  friend bool operator==(const NodeAllocation&, const NodeAllocation&) = default;
};

struct LinkAllocation {
  std::string link;
  Kbps kbps = 0;
  friend bool operator==(const LinkAllocation&, const LinkAllocation&) = default;
};

struct NetworkSliceInstance {
  std::string id;
  Nest nest;
  NsiState state = NsiState::Requested;
  std::string ingress;
  std::string egress;
  std::vector<mano::VnfDescriptor> chain;
  std::vector<std::string> vnf_chain;  // VNF instance ids in chain order
  mano::Placement placement;
  std::vector<NodeAllocation> node_allocations;
  std::vector<LinkAllocation> link_allocations;
  SimTime created_at = 0.0;
  SimTime updated_at = 0.0;
  std::string failure_reason;

  friend bool operator==(const NetworkSliceInstance&, const NetworkSliceInstance&) = default;
};

nlohmann::json to_json(const NetworkSliceInstance& nsi);
NetworkSliceInstance nsi_from_json(const nlohmann::json& j);

struct LifecycleEvent {
  SimTime timestamp = 0.0;
  std::string nsi_id;
  std::optional<NsiState> from;  // nullopt on creation
  NsiState to = NsiState::Requested;
  std::string reason;
};

using LifecycleSink = std::function<void(const LifecycleEvent&)>;

struct UpdateOptions {
  std::set<std::string> excluded_links;
  std::set<std::string> excluded_nodes;
};

/// Owns NSIs and drives MANO. Not thread-safe; callers serialize mutations.
class SliceOrchestrator {
 public:
  explicit SliceOrchestrator(mano::Mano& mano, LifecycleSink sink = {},
                             std::function<SimTime()> clock = {});

  /// Creates a Requested NSI without touching MANO.
  const NetworkSliceInstance& request(const Nest& nest, const std::string& ingress,
                                      const std::string& egress);

  /// Plans, places and deploys a Requested NSI. On failure every allocation
  /// is rolled back, the NSI ends Terminated with a reason and the error
  /// (PlacementFailed or ResourceExhausted) is rethrown.
  const NetworkSliceInstance& realize(const std::string& id);

  /// request() followed by realize().
  const NetworkSliceInstance& instantiate(const Nest& nest, const std::string& ingress,
                                          const std::string& egress);

  /// Make-before-break update of an Active or Degraded NSI. The new chain is
  /// committed while the old one is still reserved; only then does the NSI
  /// pass through Updating and release the old allocations. On failure the
  /// NSI is untouched. Throws IllegalState, ResourceExhausted, PlacementFailed.
  const NetworkSliceInstance& update(const std::string& id, const Nest& new_nest,
                                     const UpdateOptions& opts = {});

  /// Releases everything and ends in Terminated. Throws IllegalState on a
  /// Terminated NSI.
  const NetworkSliceInstance& terminate(const std::string& id);

  /// Active -> Degraded; no-op if already Degraded. Throws IllegalState.
  void mark_degraded(const std::string& id, const std::string& reason);

  /// Drops a Terminated NSI from the table.
  void forget(const std::string& id);

  const NetworkSliceInstance* find(const std::string& id) const;
  /// Throws UnknownId.
  const NetworkSliceInstance& get(const std::string& id) const;
  const std::map<std::string, NetworkSliceInstance>& all() const { return nsis_; }

  /// Per node and link, the sum of slice allocations must equal the VIM's
  /// recorded usage. Returns the first mismatch, or empty.
  std::string check_ledger() const;

  std::uint64_t next_sequence() const { return next_seq_; }

  nlohmann::json to_json() const;
  void restore(const nlohmann::json& j);

 private:
  NetworkSliceInstance& mut(const std::string& id);
  void transition(NetworkSliceInstance& nsi, NsiState to, const std::string& reason = {});
  void release(NetworkSliceInstance& nsi);
  [[noreturn]] void raise_placement_error(const mano::PlacementRequest& req,
                                          const std::string& context) const;
  SimTime now() const { return clock_ ? clock_() : 0.0; }

  mano::Mano& mano_;
  LifecycleSink sink_;
  std::function<SimTime()> clock_;
  std::map<std::string, NetworkSliceInstance> nsis_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace gridibn::slice
