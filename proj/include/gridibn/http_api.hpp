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

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

#include "gridibn/service.hpp"

namespace httplib {
class Server;
}

namespace gridibn::api {

/// One worker thread executes every mutation in submission order.
class CommandQueue {
 public:
  CommandQueue();
  ~CommandQueue();
  CommandQueue(const CommandQueue&) = delete;
  CommandQueue& operator=(const CommandQueue&) = delete;

  /// Runs f on the worker and waits for its result; exceptions propagate.
  template <typename F>
  auto run(F f) -> decltype(f()) {
    using R = decltype(f());
    auto task = std::make_shared<std::packaged_task<R()>>(std::move(f));
    auto fut = task->get_future();
    post([task] { (*task)(); });
    return fut.get();
  }

 private:
  void post(std::function<void()> job);
  void loop();

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  bool stopping_ = false;
  std::thread worker_;
};

/// HTTP/JSON front end. Writers go through the command queue under an
/// exclusive lock; readers take a shared lock and never wait on the queue.
class HttpApi {
 public:
  explicit HttpApi(Service& svc);
  ~HttpApi();

  /// Drives a scenario in the background, one sim second per
  /// `wall_per_sim_s` wall seconds (0 runs flat out).
  void start_scenario(sim::Scenario sc, RunOptions opts, double wall_per_sim_s);
  /// True once the background scenario has reached its end.
  bool scenario_done() const { return scenario_done_; }

  /// Blocks serving until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and serves on a background thread.
  int listen_in_background(const std::string& host);
  void stop();

 private:
  void routes();
  void drive(double wall_per_sim_s);

  Service& svc_;
  std::shared_mutex state_mu_;
  CommandQueue queue_;
  std::unique_ptr<httplib::Server> srv_;
  std::thread server_thread_;

  std::unique_ptr<ScenarioRun> run_;
  std::thread driver_;
  std::mutex driver_mu_;
  std::condition_variable driver_cv_;
  std::atomic<bool> stopping_{false};
  std::atomic<bool> scenario_done_{false};
};

}  // namespace gridibn::api
