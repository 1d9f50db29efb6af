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

#include "gridibn/nest.hpp"

namespace gridibn {

nlohmann::json to_json(const Nest& n) {
  return {{"gst_id", n.gst_id},
          {"slice_type", std::string(to_string(n.slice_type))},
          {"max_latency_ms", n.max_latency_ms},
          {"min_reliability", n.min_reliability},
          {"guaranteed_bandwidth_mbps", n.guaranteed_bandwidth_mbps},
          {"max_device_density", n.max_device_density},
          {"isolation_level", std::string(to_string(n.isolation))},
          {"source_profile", n.source_profile}};
}

Nest nest_from_json(const nlohmann::json& j) {
  Nest n;
  n.gst_id = j.at("gst_id").get<std::string>();
  n.slice_type = parse_category(j.at("slice_type").get<std::string>()).value();
  n.max_latency_ms = j.at("max_latency_ms").get<double>();
  n.min_reliability = j.at("min_reliability").get<double>();
  n.guaranteed_bandwidth_mbps = j.at("guaranteed_bandwidth_mbps").get<double>();
  n.max_device_density = j.at("max_device_density").get<std::int64_t>();
  n.isolation = parse_isolation(j.at("isolation_level").get<std::string>()).value();
  n.source_profile = j.at("source_profile").get<std::string>();
  return n;
}

}  // namespace gridibn
