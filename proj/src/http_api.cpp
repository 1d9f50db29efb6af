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

#include "gridibn/http_api.hpp"

#include <chrono>
#include <limits>

#include "httplib.h"

namespace gridibn::api {

using nlohmann::json;

CommandQueue::CommandQueue() : worker_([this] { loop(); }) {}

CommandQueue::~CommandQueue() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void CommandQueue::post(std::function<void()> job) {
  {
    std::lock_guard lock(mu_);
    jobs_.push_back(std::move(job));
  }
  cv_.notify_one();
}

void CommandQueue::loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !jobs_.empty(); });
      if (jobs_.empty()) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
    }
    job();
  }
}

namespace {

int status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownId:
    case ErrorCode::UnknownLink:
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownInstance:
      return 404;
    case ErrorCode::SchemaError:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownUnit:
      return 400;
    case ErrorCode::VersionMismatch:
    case ErrorCode::IllegalState:
    case ErrorCode::UnboundSource:
      return 409;
    default:
      return 422;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  json err = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (const auto* s = dynamic_cast<const SchemaError*>(&e)) err["path"] = s->path();
  send_json(res, status_for(e.code()), {{"error", err}});
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    send_json(res, 400, {{"error", {{"code", "SchemaError"}, {"message", e.what()}}}});
    return std::nullopt;
  }
}

double param_or(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stod(req.get_param_value(key));
  } catch (const std::exception&) {
    throw SchemaError(std::string("?") + key, "not a number");
  }
}

}  // namespace

HttpApi::HttpApi(Service& svc) : svc_(svc), srv_(std::make_unique<httplib::Server>()) { routes(); }

HttpApi::~HttpApi() { stop(); }

void HttpApi::routes() {
  auto& s = *srv_;

  // Exceptions escaping a handler become JSON errors.
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}});
    }
  });

  s.Post("/intents", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    const auto who_name = req.has_header("X-Stakeholder") ? req.get_header_value("X-Stakeholder") : "DSO";
    const auto who = parse_stakeholder(who_name);
    if (!who) throw SchemaError("X-Stakeholder", "unknown stakeholder '" + who_name + "'");
    if (!body->contains("text") || !(*body)["text"].is_string()) throw SchemaError("/text", "missing");
    const auto text = (*body)["text"].get<std::string>();
    const bool dry = body->value("dry_run", false);
    const auto result = queue_.run([&] {
      std::unique_lock lock(state_mu_);
      return svc_.submit_intent(*who, text, dry);
    });
    int status = result.dry_run ? 200 : 201;
    if (result.error) status = result.error->stage == "parse" ? 400 : 422;
    send_json(res, status, to_json(result));
  });

  s.Get("/intents", [this](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(state_mu_);
    send_json(res, 200, svc_.list_intents());
  });

  s.Get("/slices", [this](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(state_mu_);
    send_json(res, 200, svc_.list_slices());
  });

  s.Get(R"(/slices/([^/]+)/kpi)", [this](const httplib::Request& req, httplib::Response& res) {
    const double from = param_or(req, "from", 0.0);
    const double to = param_or(req, "to", std::numeric_limits<double>::max());
    std::shared_lock lock(state_mu_);
    send_json(res, 200, svc_.get_kpi(req.matches[1], from, to));
  });

  s.Get(R"(/slices/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::shared_lock lock(state_mu_);
    send_json(res, 200, svc_.get_slice(req.matches[1]));
  });

  s.Post("/faults", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    auto f = sim::fault_from_json(*body);
    const auto effective = queue_.run([&] {
      std::unique_lock lock(state_mu_);
      if (!body->contains("at")) f.at = svc_.now();
      svc_.inject_fault(f);
      return std::max(f.at, svc_.now());
    });
    send_json(res, 202, {{"status", "accepted"}, {"effective_at", effective}, {"fault", sim::to_json(f)}});
  });

  s.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
    const auto after = static_cast<std::uint64_t>(param_or(req, "after", 0.0));
    const auto wait_ms = static_cast<long>(param_or(req, "wait_ms", 0.0));
    const auto records = wait_ms > 0 ? svc_.log().wait_after(after, std::chrono::milliseconds(wait_ms))
                                     : svc_.log().after(after);
    std::string body;
    for (const auto& e : records) {
      body += to_line(e);
      body += '\n';
    }
    res.status = 200;
    res.set_content(body, "application/x-ndjson");
  });

  s.Post("/snapshot", [this](const httplib::Request&, httplib::Response& res) {
    const auto snap = queue_.run([&] {
      std::shared_lock lock(state_mu_);
      return svc_.snapshot();
    });
    send_json(res, 200, snap);
  });

  s.Post("/restore", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    const auto version = queue_.run([&] {
      if (run_ && !scenario_done_) throw Error(ErrorCode::IllegalState, "a scenario is running");
      std::unique_lock lock(state_mu_);
      return svc_.restore(*body);
    });
    send_json(res, 200, {{"version", version}});
  });
}

void HttpApi::start_scenario(sim::Scenario sc, RunOptions opts, double wall_per_sim_s) {
  queue_.run([&] {
    std::unique_lock lock(state_mu_);
    run_ = std::make_unique<ScenarioRun>(svc_, std::move(sc), std::move(opts));
  });
  driver_ = std::thread([this, wall_per_sim_s] { drive(wall_per_sim_s); });
}

void HttpApi::drive(double wall_per_sim_s) {
  for (;;) {
    const auto [done, wait_s] = queue_.run([&] {
      std::shared_lock lock(state_mu_);
      return std::make_pair(run_->done(), run_->done() ? 0.0 : run_->next_time() - svc_.now());
    });
    if (done) break;
    if (wall_per_sim_s > 0 && wait_s > 0) {
      std::unique_lock lock(driver_mu_);
      driver_cv_.wait_for(lock, std::chrono::duration<double>(wait_s * wall_per_sim_s),
                          [&] { return stopping_.load(); });
    }
    if (stopping_) return;
    queue_.run([&] {
      std::unique_lock lock(state_mu_);
      run_->step();
    });
  }
  scenario_done_ = true;
}

bool HttpApi::listen(const std::string& host, int port) { return srv_->listen(host, port); }

int HttpApi::listen_in_background(const std::string& host) {
  const int port = srv_->bind_to_any_port(host);
  if (port < 0) return port;
  server_thread_ = std::thread([this] { srv_->listen_after_bind(); });
  srv_->wait_until_ready();
  return port;
}

void HttpApi::stop() {
  stopping_ = true;
  driver_cv_.notify_all();
  if (driver_.joinable()) driver_.join();
  srv_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (run_) {
    queue_.run([&] {
      std::unique_lock lock(state_mu_);
      run_.reset();
    });
  }
}

}  // namespace gridibn::api
