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

// gridibn command line: serve, run-scenario, submit-intent, snapshot.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gridibn/http_api.hpp"
#include "gridibn/service.hpp"
#include "httplib.h"

namespace fs = std::filesystem;
using gridibn::api::Service;
using gridibn::api::ServiceConfig;
using nlohmann::json;

namespace {

fs::path data_dir() {
  if (const char* env = std::getenv("GRIDIBN_DATA")) return env;
#ifdef GRIDIBN_DATA_DIR
  return GRIDIBN_DATA_DIR;
#else
  return "data";
#endif
}

fs::path default_config() { return data_dir() / "config.json"; }

// A scenario argument is a file, or a name under data/scenarios.
fs::path resolve_scenario(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  auto named = data_dir() / "scenarios" / (arg + ".json");
  if (fs::exists(named)) return named;
  throw gridibn::SchemaError(arg, "no such scenario file or name");
}

std::pair<std::string, int> split_listen(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) return {addr, 8080};
  return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
}

std::unique_ptr<httplib::Client> client_for(const std::string& url) {
  auto cli = std::make_unique<httplib::Client>(url);
  cli->set_read_timeout(std::chrono::seconds(30));
  return cli;
}

// Replays the whole log into a fresh service; the regenerated log and the
// final observable state must both match the live run.
std::string check_replay(const ServiceConfig& cfg, const Service& live) {
  Service again(cfg);
  std::vector<gridibn::api::EventRecord> inputs;
  std::string expected;
  for (const auto& e : live.log().all()) {
    if (e.type() == "fault.queued") continue;
    inputs.push_back(e);
    expected += gridibn::api::to_line(e) + "\n";
  }
  again.replay(inputs);
  if (again.log().to_jsonl() != expected) return "replayed event log differs from the live log";
  if (again.observable_state() != live.observable_state()) return "replayed state differs from the live state";
  return {};
}

int run_scenario(const std::string& scenario_arg, std::optional<std::uint64_t> seed, const std::string& out,
                 const std::string& samples_out, const std::string& config_file, const std::string& snapshot_out) {
  const auto cfg = ServiceConfig::load(config_file);
  auto sc = gridibn::sim::load_scenario_file(resolve_scenario(scenario_arg));
  Service svc(cfg);
  svc.bootstrap(false);

  std::ofstream samples;
  gridibn::api::RunOptions opts;
  opts.seed = seed;
  if (!samples_out.empty()) {
    samples.open(samples_out);
    opts.samples = [&samples](const gridibn::sim::KpiSample& s) { samples << gridibn::sim::to_json(s).dump() << '\n'; };
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> problems;
  std::map<std::string, std::string> bindings;
  {
    gridibn::api::ScenarioRun run(svc, std::move(sc), std::move(opts));
    run.run();
    problems = run.problems();
    bindings = run.bindings();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (auto r = check_replay(cfg, svc); !r.empty()) problems.push_back(r);

  if (!out.empty()) {
    std::ofstream f(out);
    f << svc.log().to_jsonl();
  }
  if (!snapshot_out.empty()) {
    std::ofstream f(snapshot_out);
    f << svc.snapshot().dump(2) << '\n';
  }

  json summary = {{"events", svc.log().last_seq()},
                  {"slices", svc.list_slices()},
                  {"bindings", bindings},
                  {"wall_seconds", wall},
                  {"problems", problems}};
  std::cout << summary.dump(2) << '\n';
  return problems.empty() ? 0 : 1;
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridibn: intent-based slicing for distribution-grid communications"};
  app.require_subcommand(1);

  std::string config_file = default_config().string();
  app.add_option("--config", config_file, "service config document");

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  std::string topology_file, scenario_arg, listen = "127.0.0.1:8080";
  std::optional<std::uint64_t> seed;
  std::optional<double> time_scale;
  serve->add_option("--config", config_file, "service config document");
  serve->add_option("--topology", topology_file, "topology document (overrides the config)");
  serve->add_option("--scenario", scenario_arg, "scenario file or name to drive in the background");
  serve->add_option("--seed", seed, "scenario seed override");
  serve->add_option("--listen", listen, "HOST:PORT");
  serve->add_option("--time-scale", time_scale, "wall seconds per simulated second (0: flat out)");

  auto* run = app.add_subcommand("run-scenario", "headless batch run");
  std::string out, samples_out, snapshot_out;
  run->add_option("scenario", scenario_arg, "scenario file or name")->required();
  run->add_option("--seed", seed, "seed override");
  run->add_option("--out", out, "write the event log (line-delimited) here");
  run->add_option("--samples", samples_out, "write per-message samples here");
  run->add_option("--snapshot-out", snapshot_out, "write the final state snapshot here");
  run->add_option("--config", config_file, "service config document");

  auto* submit = app.add_subcommand("submit-intent", "submit one intent");
  std::string who = "DSO", text, server;
  bool dry_run = false;
  submit->add_option("--as", who, "stakeholder");
  submit->add_option("text", text, "intent text")->required();
  submit->add_option("--server", server, "base URL of a running server; in-process when absent");
  submit->add_flag("--dry-run", dry_run, "translate, validate and check feasibility only");
  submit->add_option("--config", config_file, "service config document");

  auto* snap = app.add_subcommand("snapshot", "write a state snapshot");
  snap->add_option("--out", out, "output file")->required();
  snap->add_option("--server", server, "base URL of a running server; in-process when absent");
  snap->add_option("--config", config_file, "service config document");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_scenario(scenario_arg, seed, out, samples_out, config_file, snapshot_out);

    if (*submit) {
      json result;
      if (!server.empty()) {
        auto cli = client_for(server);
        httplib::Headers headers = {{"X-Stakeholder", who}};
        auto res = cli->Post("/intents", headers, json{{"text", text}, {"dry_run", dry_run}}.dump(),
                             "application/json");
        if (!res) {
          std::cerr << "request failed: " << httplib::to_string(res.error()) << '\n';
          return 2;
        }
        result = json::parse(res->body);
      } else {
        const auto stakeholder = gridibn::parse_stakeholder(who);
        if (!stakeholder) {
          std::cerr << "unknown stakeholder " << who << '\n';
          return 2;
        }
        Service svc(ServiceConfig::load(config_file));
        svc.bootstrap();
        result = gridibn::api::to_json(svc.submit_intent(*stakeholder, text, dry_run));
      }
      std::cout << result.dump(2) << '\n';
      return result.contains("error") ? 1 : 0;
    }

    if (*snap) {
      json doc;
      if (!server.empty()) {
        auto res = client_for(server)->Post("/snapshot", "", "application/json");
        if (!res) {
          std::cerr << "request failed: " << httplib::to_string(res.error()) << '\n';
          return 2;
        }
        doc = json::parse(res->body);
      } else {
        Service svc(ServiceConfig::load(config_file));
        svc.bootstrap();
        doc = svc.snapshot();
      }
      std::ofstream f(out);
      f << doc.dump(2) << '\n';
      return 0;
    }

    if (*serve) {
      auto cfg = ServiceConfig::load(config_file);
      if (!topology_file.empty()) {
        std::ifstream in(topology_file);
        cfg.topology = json::parse(in);
      }
      Service svc(cfg);
      gridibn::api::HttpApi api(svc);
      if (!scenario_arg.empty()) {
        svc.bootstrap(false);
        gridibn::api::RunOptions opts;
        opts.seed = seed;
        api.start_scenario(gridibn::sim::load_scenario_file(resolve_scenario(scenario_arg)), std::move(opts),
                           time_scale.value_or(cfg.time_scale));
      } else {
        svc.bootstrap();
      }
      const auto [host, port] = split_listen(listen);
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      std::thread watcher([&] {
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        api.stop();
      });
      std::cerr << "listening on " << host << ":" << port << '\n';
      const bool ok = api.listen(host, port);
      g_stop = 1;
      watcher.join();
      return ok ? 0 : 2;
    }
  } catch (const gridibn::Error& e) {
    std::cerr << gridibn::to_string(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
