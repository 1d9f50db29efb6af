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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridibn {

/// Simulation time in seconds.
using SimTime = double;

enum class SliceCategory { Urllc, Embb, Mmtc };

enum class Stakeholder { Dso, Prosumer, DrAggregator, Csp };

enum class Application { Wams, ProtectionFlisr, Ami, RemoteInspection };

enum class Isolation { Shared, Dedicated };

std::string_view to_string(SliceCategory c);
std::string_view to_string(Stakeholder s);
std::string_view to_string(Application a);
std::string_view to_string(Isolation i);

std::optional<SliceCategory> parse_category(std::string_view s);
std::optional<Stakeholder> parse_stakeholder(std::string_view s);
std::optional<Application> parse_application(std::string_view s);
std::optional<Isolation> parse_isolation(std::string_view s);

/// Each application class maps to exactly one slice category.
SliceCategory category_for(Application a);

enum class ErrorCode {
  SyntaxError,
  UnknownUnit,
  UntranslatableIntent,
  ContradictoryClauses,
  DuplicateId,
  InvalidSla,
  NoSlaOnFile,
  SlaRejected,
  NoMatchingTemplate,
  StaleSnapshot,
  PlacementFailed,
  ResourceExhausted,
  IllegalState,
  NoFeasiblePlacement,
  UnknownInstance,
  UnknownLink,
  UnknownNode,
  SchemaError,
  UnboundSource,
  EmptyWindow,
  UnknownId,
  VersionMismatch,
};

std::string_view to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 0-based byte offset into the intent text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected,
              const std::string& what, ErrorCode code = ErrorCode::SyntaxError)
      : Error(code, what), position_(position), expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

/// Structured-document validation failure; path is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& reason)
      : Error(ErrorCode::SchemaError, path + ": " + reason), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Integer resource vector: CPU in milli-units, memory in MB. Integer
/// arithmetic keeps ledger conservation exact.
struct ResourceVector {
  std::int64_t cpu_milli = 0;
  std::int64_t memory_mb = 0;

  ResourceVector& operator+=(const ResourceVector& o) {
    cpu_milli += o.cpu_milli;
    memory_mb += o.memory_mb;
    return *this;
  }
  ResourceVector& operator-=(const ResourceVector& o) {
    cpu_milli -= o.cpu_milli;
    memory_mb -= o.memory_mb;
    return *this;
  }
  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
  friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) { return a -= b; }
  friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

  /// Componentwise a <= b.
  bool fits_within(const ResourceVector& b) const {
    return cpu_milli <= b.cpu_milli && memory_mb <= b.memory_mb;
  }
  bool is_zero() const { return cpu_milli == 0 && memory_mb == 0; }
  bool non_negative() const { return cpu_milli >= 0 && memory_mb >= 0; }
};

/// Bandwidth ledgers are kept in integer kbps.
using Kbps = std::int64_t;

Kbps mbps_to_kbps(double mbps);
double kbps_to_mbps(Kbps kbps);

}  // namespace gridibn
