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

#include <cstdint>
#include <string>

#include "gridibn/common.hpp"
#include "json.hpp"

namespace gridibn {

/// A slice template with every attribute bound to a concrete value.
struct Nest {
  std::string gst_id;
  SliceCategory slice_type = SliceCategory::Urllc;
  double max_latency_ms = 0.0;
  double min_reliability = 0.0;
  double guaranteed_bandwidth_mbps = 0.0;
  std::int64_t max_device_density = 1;
  Isolation isolation = Isolation::Shared;
  std::string source_profile;

  friend bool operator==(const Nest&, const Nest&) = default;
};

nlohmann::json to_json(const Nest& n);
Nest nest_from_json(const nlohmann::json& j);

}  // namespace gridibn
