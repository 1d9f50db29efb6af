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

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gridibn/intent_dsl.hpp"
#include "gridibn/mano.hpp"
#include "gridibn/service.hpp"
#include "json.hpp"

namespace gridibn::testing {

std::filesystem::path data_path(const std::string& rel);
std::filesystem::path docs_path(const std::string& rel);
std::filesystem::path golden_path(const std::string& rel);

std::string read_text(const std::filesystem::path& p);
nlohmann::json read_json(const std::filesystem::path& p);

/// The shipped config under data/.
api::ServiceConfig shipped_config();
/// Shipped config with the topology replaced.
api::ServiceConfig config_with_topology(const nlohmann::json& topology);

mano::Infrastructure reference_topology();

/// Connected random topology with n nodes. Latencies are multiples of 0.25 ms
/// so sums compare exactly.
mano::Infrastructure random_topology(std::mt19937_64& rng, std::size_t n, double extra_link_prob = 0.4,
                                     std::int64_t max_cpu = 8000, std::int64_t max_mem = 16384,
                                     double max_link_mbps = 100.0);

/// Two-node topology, one link: a -- b.
nlohmann::json two_node_topology(double latency_ms = 2.0, double capacity_mbps = 100.0);

/// Random valid AST; clause values mix integers, short decimals and
/// arbitrary doubles.
intent::IntentAst random_ast(std::mt19937_64& rng);

/// A row of the error table in docs/intent-grammar.md.
struct DocumentedError {
  std::string input;
  std::optional<std::size_t> position;  // parse errors only
  std::string code;
};

/// Parse errors, then translation errors, as documented.
std::vector<DocumentedError> documented_parse_errors();
std::vector<DocumentedError> documented_translation_errors();

}  // namespace gridibn::testing
