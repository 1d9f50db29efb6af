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

#include "gridibn/monitor_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridibn::monitor {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

double from_nullable(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

json to_json(const ComplianceVerdict& v) {
  json statuses = json::array();
  for (const auto& s : v.statuses) {
    statuses.push_back({{"kpi", s.kpi},
                        {"status", s.met ? "Met" : "Violated"},
                        {"observed", finite_or_null(s.observed)},
                        {"bound", s.bound}});
  }
  return {{"slice", v.slice},
          {"window_start", v.window_start},
          {"window_end", v.window_end},
          {"statuses", statuses},
          {"overall", v.overall ? "Met" : "Violated"}};
}

ComplianceVerdict verdict_from_json(const json& j) {
  ComplianceVerdict v;
  v.slice = j.at("slice").get<std::string>();
  v.window_start = j.at("window_start").get<double>();
  v.window_end = j.at("window_end").get<double>();
  for (const auto& s : j.at("statuses")) {
    v.statuses.push_back({s.at("kpi").get<std::string>(), s.at("status") == "Met",
                          from_nullable(s.at("observed")), s.at("bound").get<double>()});
  }
  v.overall = j.at("overall") == "Met";
  return v;
}

ComplianceVerdict evaluate(const sim::KpiReport& report, const service::ServiceProfile& profile) {
  if (report.empty()) {
    throw Error(ErrorCode::EmptyWindow, "slice " + report.slice + ": no messages in window [" +
                                            std::to_string(report.window_start) + ", " +
                                            std::to_string(report.window_end) + ")");
  }
  const auto& r = profile.requirements;
  ComplianceVerdict v;
  v.slice = report.slice;
  v.window_start = report.window_start;
  v.window_end = report.window_end;

  const double p99 = report.p99_latency_ms.value_or(std::numeric_limits<double>::infinity());
  v.statuses.push_back({"latency", p99 <= r.latency_bound_ms, p99, r.latency_bound_ms});
  v.statuses.push_back({"availability", report.availability >= r.reliability, report.availability,
                        r.reliability});
  if (r.category == SliceCategory::Embb) {
    const double bound = 0.95 * r.bandwidth_mbps;
    v.statuses.push_back({"throughput", report.throughput_mbps >= bound, report.throughput_mbps, bound});
  }
  v.overall = std::all_of(v.statuses.begin(), v.statuses.end(), [](const KpiStatus& s) { return s.met; });
  return v;
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::None: return "None";
    case ActionKind::Rehome: return "Rehome";
    case ActionKind::ReplaceNest: return "ReplaceNest";
    case ActionKind::Alert: return "Alert";
  }
  return "?";
}

json to_json(const AdaptationAction& a) {
  json j = {{"kind", std::string(to_string(a.kind))}, {"slice", a.slice}, {"triggers", a.triggers}};
  if (a.nest) j["nest"] = gridibn::to_json(*a.nest);
  if (a.kind == ActionKind::Alert) j["reason"] = a.reason;
  return j;
}

AdaptationAction decide(const std::vector<ComplianceVerdict>& history, const LoopPolicy& policy) {
  AdaptationAction a;
  if (history.empty()) return a;
  a.slice = history.back().slice;
  const auto h = std::min<std::size_t>(history.size(), static_cast<std::size_t>(std::max(policy.h, 1)));
  const auto violated = std::count_if(history.end() - static_cast<std::ptrdiff_t>(h), history.end(),
                                      [](const ComplianceVerdict& v) { return !v.overall; });
  if (violated >= policy.k) a.kind = ActionKind::Rehome;
  return a;
}

json to_json(const LoopState& s) {
  json hist = json::array();
  for (const auto& e : s.history) hist.push_back({{"met", e.met}, {"verdict_seq", e.verdict_seq}});
  return {{"history", hist}, {"cooldown", s.cooldown}, {"level", s.level},
          {"consecutive_met", s.consecutive_met}};
}

LoopState loop_state_from_json(const json& j) {
  LoopState s;
  for (const auto& e : j.at("history")) {
    s.history.push_back({e.at("met").get<bool>(), e.at("verdict_seq").get<std::uint64_t>()});
  }
  s.cooldown = j.at("cooldown").get<int>();
  s.level = j.at("level").get<int>();
  s.consecutive_met = j.at("consecutive_met").get<int>();
  return s;
}

AdaptationAction step(LoopState& state, const HistoryEntry& latest, const std::string& slice,
                      const LoopPolicy& policy) {
  AdaptationAction a;
  a.slice = slice;

  state.history.push_back(latest);
  while (state.history.size() > static_cast<std::size_t>(std::max(policy.h, 1))) state.history.pop_front();

  if (latest.met) {
    if (++state.consecutive_met >= policy.h) state.level = 0;
  } else {
    state.consecutive_met = 0;
  }

  if (state.cooldown > 0) {
    --state.cooldown;
    return a;
  }

  std::vector<std::uint64_t> violating;
  for (const auto& e : state.history) {
    if (!e.met) violating.push_back(e.verdict_seq);
  }
  if (static_cast<int>(violating.size()) < policy.k) return a;

  switch (state.level) {
    case 0: a.kind = ActionKind::Rehome; break;
    case 1: a.kind = ActionKind::ReplaceNest; break;
    default:
      a.kind = ActionKind::Alert;
      a.reason = "remediation-exhausted";
      break;
  }
  a.triggers = std::move(violating);
  state.level = std::min(state.level + 1, 2);
  state.cooldown = policy.cooldown;
  state.history.clear();
  return a;
}

std::set<std::string> degraded_links(const slice::NetworkSliceInstance& nsi,
                                     const mano::Infrastructure& infra) {
  std::set<std::string> all;
  std::set<std::string> bad;
  for (const auto& id : nsi.placement.reserved_links()) {
    all.insert(id);
    const auto* l = infra.link(id);
    if (l && (l->degradation_ms > 0 || l->loss_prob > 0)) bad.insert(id);
  }
  return bad.empty() ? all : bad;
}

std::optional<Nest> relaxed_nest(const service::ServiceProfile& profile, const Nest& current,
                                 const std::vector<service::GstTemplate>& catalog,
                                 const service::CostWeights& weights) {
  service::SelectionPolicy raise;
  raise.isolation = current.isolation;
  raise.min_bandwidth_mbps = 2.0 * current.guaranteed_bandwidth_mbps;
  service::SelectionPolicy relax;
  relax.isolation = Isolation::Shared;
  relax.min_bandwidth_mbps = current.guaranteed_bandwidth_mbps;

  for (const auto& policy : {raise, relax}) {
    try {
      auto n = service::select_nest(profile, catalog, weights, policy);
      if (!(n == current)) return n;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoMatchingTemplate) throw;
    }
  }
  return std::nullopt;
}

json to_json(const Outcome& o) {
  return {{"requested", std::string(to_string(o.requested))},
          {"executed", std::string(to_string(o.executed))},
          {"changed", o.changed},
          {"detail", o.detail},
          {"new_path", o.new_path}};
}

Outcome apply(const AdaptationAction& action, ApplyContext& ctx) {
  Outcome out;
  out.requested = action.kind;
  out.executed = action.kind;
  if (action.kind == ActionKind::None) return out;

  auto alert = [&](const std::string& why) {
    out.executed = ActionKind::Alert;
    out.changed = false;
    out.detail = why;
    return out;
  };

  const auto* nsi = ctx.slices.find(action.slice);
  if (!nsi) return alert("unknown-slice");
  try {
    if (nsi->state == slice::NsiState::Active) ctx.slices.mark_degraded(action.slice, "kpi-violation");
  } catch (const Error& e) {
    return alert(e.what());
  }

  switch (action.kind) {
    case ActionKind::Alert:
      out.detail = action.reason;
      return out;
    case ActionKind::Rehome:
    case ActionKind::ReplaceNest: {
      slice::UpdateOptions opts;
      opts.excluded_links = degraded_links(*nsi, ctx.mano.infrastructure());
      Nest target = nsi->nest;
      if (action.kind == ActionKind::ReplaceNest) {
        if (!action.nest) return alert("no-alternative-nest");
        target = *action.nest;
      }
      try {
        const auto& updated = ctx.slices.update(action.slice, target, opts);
        out.changed = true;
        out.new_path = updated.placement.path;
        out.detail = action.kind == ActionKind::Rehome ? "re-homed" : "nest-replaced:" + target.gst_id;
      } catch (const Error& e) {
        return alert(e.code() == ErrorCode::PlacementFailed || e.code() == ErrorCode::ResourceExhausted
                         ? "no-feasible-placement"
                         : e.what());
      }
      return out;
    }
    case ActionKind::None: break;
  }
  return out;
}

}  // namespace gridibn::monitor
