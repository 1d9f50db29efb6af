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

#include "gridibn/event_log.hpp"

#include <algorithm>
#include <istream>

namespace gridibn::api {

using nlohmann::json;

json to_json(const EventRecord& e) {
  return {{"seq", e.seq}, {"t", e.t}, {"category", e.category}, {"payload", e.payload}};
}

EventRecord event_from_json(const json& j) {
  EventRecord e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.t = j.at("t").get<double>();
  e.category = j.at("category").get<std::string>();
  e.payload = j.at("payload");
  return e;
}

std::string to_line(const EventRecord& e) { return to_json(e).dump(); }

std::vector<EventRecord> parse_jsonl(std::istream& in) {
  std::vector<EventRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError("line " + std::to_string(n), e.what());
    }
  }
  return out;
}

EventRecord EventLog::append(SimTime t, std::string category, json payload) {
  EventRecord e;
  {
    std::lock_guard lock(mu_);
    e = {next_seq_++, t, std::move(category), std::move(payload)};
    records_.push_back(e);
  }
  cv_.notify_all();
  return e;
}

namespace {

std::vector<EventRecord> tail(const std::vector<EventRecord>& records, std::uint64_t seq) {
  auto it = std::upper_bound(records.begin(), records.end(), seq,
                             [](std::uint64_t s, const EventRecord& e) { return s < e.seq; });
  return {it, records.end()};
}

}  // namespace

std::vector<EventRecord> EventLog::after(std::uint64_t seq) const {
  std::lock_guard lock(mu_);
  return tail(records_, seq);
}

std::vector<EventRecord> EventLog::wait_after(std::uint64_t seq, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return next_seq_ > seq + 1; });
  return tail(records_, seq);
}

std::vector<EventRecord> EventLog::all() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::uint64_t EventLog::last_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_ - 1;
}

std::uint64_t EventLog::next_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_;
}

void EventLog::rewind(std::uint64_t seq) {
  {
    std::lock_guard lock(mu_);
    while (!records_.empty() && records_.back().seq > seq) records_.pop_back();
    const bool prefix = !records_.empty() && records_.back().seq == seq;
    if (!prefix) records_.clear();
    next_seq_ = seq + 1;
  }
  cv_.notify_all();
}

std::string EventLog::to_jsonl() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& e : records_) {
    out += to_line(e);
    out += '\n';
  }
  return out;
}

}  // namespace gridibn::api
