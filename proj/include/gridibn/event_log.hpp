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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

#include "gridibn/common.hpp"
#include "json.hpp"

namespace gridibn::api {

struct EventRecord {
  std::uint64_t seq = 0;
  SimTime t = 0.0;
  std::string category;  // intent, sla, profile, slice, mano, kpi, action
  nlohmann::json payload;  // always carries "type"

  std::string type() const { return payload.value("type", ""); }
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

nlohmann::json to_json(const EventRecord& e);
EventRecord event_from_json(const nlohmann::json& j);
/// One line of the line-delimited log, without the trailing newline.
std::string to_line(const EventRecord& e);
/// Throws SchemaError on a malformed line.
std::vector<EventRecord> parse_jsonl(std::istream& in);

/// Append-only, gapless. Appends and reads may come from different threads;
/// readers can block until something newer arrives.
class EventLog {
 public:
  explicit EventLog(std::uint64_t first_seq = 1) : next_seq_(first_seq) {}

  EventRecord append(SimTime t, std::string category, nlohmann::json payload);

  std::vector<EventRecord> after(std::uint64_t seq) const;
  /// Like after(), but waits up to `timeout` while nothing newer exists.
  std::vector<EventRecord> wait_after(std::uint64_t seq, std::chrono::milliseconds timeout) const;

  std::vector<EventRecord> all() const;
  std::uint64_t last_seq() const;
  std::uint64_t next_seq() const;

  /// Drops every record after `seq` and continues numbering at seq + 1.
  /// Records up to `seq` survive only if the log holds a gapless prefix.
  void rewind(std::uint64_t seq);

  std::string to_jsonl() const;

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<EventRecord> records_;
  std::uint64_t next_seq_;
};

}  // namespace gridibn::api
