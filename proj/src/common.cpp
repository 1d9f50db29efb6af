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

#include "gridibn/common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace gridibn {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(SliceCategory c) {
  switch (c) {
    case SliceCategory::Urllc: return "URLLC";
    case SliceCategory::Embb: return "eMBB";
    case SliceCategory::Mmtc: return "mMTC";
  }
  return "?";
}

std::string_view to_string(Stakeholder s) {
  switch (s) {
    case Stakeholder::Dso: return "DSO";
    case Stakeholder::Prosumer: return "PROSUMER";
    case Stakeholder::DrAggregator: return "DR_AGGREGATOR";
    case Stakeholder::Csp: return "CSP";
  }
  return "?";
}

std::string_view to_string(Application a) {
  switch (a) {
    case Application::Wams: return "wams";
    case Application::ProtectionFlisr: return "protection_flisr";
    case Application::Ami: return "ami";
    case Application::RemoteInspection: return "remote_inspection";
  }
  return "?";
}

std::string_view to_string(Isolation i) {
  return i == Isolation::Shared ? "shared" : "dedicated";
}

std::optional<SliceCategory> parse_category(std::string_view s) {
  if (iequals(s, "URLLC")) return SliceCategory::Urllc;
  if (iequals(s, "eMBB") || iequals(s, "MMBB_EMBB")) return SliceCategory::Embb;
  if (iequals(s, "mMTC")) return SliceCategory::Mmtc;
  return std::nullopt;
}

std::optional<Stakeholder> parse_stakeholder(std::string_view s) {
  if (iequals(s, "DSO")) return Stakeholder::Dso;
  if (iequals(s, "PROSUMER")) return Stakeholder::Prosumer;
  if (iequals(s, "DR_AGGREGATOR")) return Stakeholder::DrAggregator;
  if (iequals(s, "CSP")) return Stakeholder::Csp;
  return std::nullopt;
}

std::optional<Application> parse_application(std::string_view s) {
  if (iequals(s, "wams")) return Application::Wams;
  if (iequals(s, "protection_flisr") || iequals(s, "protection") || iequals(s, "flisr"))
    return Application::ProtectionFlisr;
  if (iequals(s, "ami")) return Application::Ami;
  if (iequals(s, "remote_inspection") || iequals(s, "inspection"))
    return Application::RemoteInspection;
  return std::nullopt;
}

std::optional<Isolation> parse_isolation(std::string_view s) {
  if (iequals(s, "shared")) return Isolation::Shared;
  if (iequals(s, "dedicated")) return Isolation::Dedicated;
  return std::nullopt;
}

SliceCategory category_for(Application a) {
  switch (a) {
    case Application::Wams: return SliceCategory::Urllc;
    case Application::ProtectionFlisr: return SliceCategory::Urllc;
    case Application::Ami: return SliceCategory::Mmtc;
    case Application::RemoteInspection: return SliceCategory::Embb;
  }
  return SliceCategory::Urllc;
}

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownUnit: return "UnknownUnit";
    case ErrorCode::UntranslatableIntent: return "UntranslatableIntent";
    case ErrorCode::ContradictoryClauses: return "ContradictoryClauses";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidSla: return "InvalidSla";
    case ErrorCode::NoSlaOnFile: return "NoSlaOnFile";
    case ErrorCode::SlaRejected: return "SlaRejected";
    case ErrorCode::NoMatchingTemplate: return "NoMatchingTemplate";
    case ErrorCode::StaleSnapshot: return "StaleSnapshot";
    case ErrorCode::PlacementFailed: return "PlacementFailed";
    case ErrorCode::ResourceExhausted: return "ResourceExhausted";
    case ErrorCode::IllegalState: return "IllegalState";
    case ErrorCode::NoFeasiblePlacement: return "NoFeasiblePlacement";
    case ErrorCode::UnknownInstance: return "UnknownInstance";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnboundSource: return "UnboundSource";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
  }
  return "?";
}

Kbps mbps_to_kbps(double mbps) {
  // Round up so a reservation never under-covers the requested rate.
  return static_cast<Kbps>(std::ceil(mbps * 1000.0 - 1e-6));
}

double kbps_to_mbps(Kbps kbps) { return static_cast<double>(kbps) / 1000.0; }

}  // namespace gridibn
