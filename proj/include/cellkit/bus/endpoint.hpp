// Copyright 2026 cellkit contributors
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
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cellkit/bus/message.hpp"
#include "cellkit/common/clock.hpp"

namespace cellkit::bus {

// Outcome of request(): either the reply body, or a timeout. A request to
// a dead or absent provider produces a timeout after the full budget; there
// is no fast-path "no such service" error, callers own their deadline.
struct ReplyResult {
  bool timed_out = true;
  Json body;
};

// Client connection to the Broker. One socket, one background reader
// thread. Subscription and service callbacks run serialized on the reader
// thread, so they must not block on request() issued through the same
// endpoint; request() is meant for the component's own threads.
class BusEndpoint {
 public:
  // Connects to 127.0.0.1:port and identifies as component_id. The clock
  // stamps ts_us and measures request timeouts; defaults to an unscaled
  // monotonic clock owned by the endpoint.
  static std::unique_ptr<BusEndpoint> connect(uint16_t port,
                                              const std::string& component_id,
                                              Clock* clock = nullptr);

  ~BusEndpoint();

  BusEndpoint(const BusEndpoint&) = delete;
  BusEndpoint& operator=(const BusEndpoint&) = delete;

  void publish(const std::string& topic, Json body);

  // Registers cb for every pub/hb whose topic matches the pattern.
  // Returns once the broker has the subscription, so messages published
  // afterwards by anyone are delivered.
  void subscribe(const std::string& pattern,
                 std::function<void(const Message&)> cb);

  // Serves a request topic. The handler runs on the reader thread; its
  // return value is the reply body. A throwing handler sends no reply and
  // the error line is published on log/<component_id>.
  void advertise(const std::string& service_topic,
                 std::function<Json(const Json&)> handler);

  ReplyResult request(const std::string& service_topic, Json body,
                      int64_t timeout_ms);

  // A reply cell for the fire-and-poll request form. done flips on the
  // reader thread under the endpoint's state lock; poll_async() is the
  // only sanctioned reader.
  struct PendingCell {
    bool done = false;
    Json body;
  };

  // Handle for one in-flight request_async(). Falsy once the result has
  // been taken (or the handle was never issued).
  struct AsyncRequest {
    int64_t id = 0;
    int64_t deadline_us = 0;
    std::shared_ptr<PendingCell> cell;
    explicit operator bool() const { return cell != nullptr; }
  };

  // Fire-and-poll variant of request() for single-threaded tick loops:
  // sends now, never blocks. poll_async() yields nothing while in flight,
  // then exactly one ReplyResult; past the deadline it reports a timeout
  // and forgets the request, so a late reply is dropped.
  AsyncRequest request_async(const std::string& service_topic, Json body,
                             int64_t timeout_ms);
  std::optional<ReplyResult> poll_async(AsyncRequest& req);

  // Abandons an in-flight request without waiting for its deadline.
  void cancel_async(AsyncRequest& req);

  // Emits Heartbeat frames on hb/<component_id> every period_ms until the
  // endpoint is destroyed. period_ms must be at least 10.
  void start_heartbeats(int64_t period_ms);

  // Runs when the socket to the broker dies. Pending requests fail first.
  void set_disconnect_handler(std::function<void()> cb);

  // Fault hooks. Stalled: heartbeats freeze and incoming requests go
  // unanswered while the socket stays open. Deaf: heartbeats keep flowing
  // but incoming requests are dropped. Both leave outbound calls working;
  // the owning component decides what else to suspend.
  void set_stalled(bool on) { stalled_ = on; }
  void set_deaf(bool on) { deaf_ = on; }
  bool stalled() const { return stalled_.load(); }

  const std::string& component_id() const { return component_id_; }
  bool connected() const { return connected_.load(); }

  // Closes the socket and joins all background threads.
  void close();

 private:
  BusEndpoint(int fd, std::string component_id, Clock* clock);

  void reader_loop();
  void heartbeat_loop(int64_t period_ms);
  void dispatch(const Message& m);
  void send_frame(Kind kind, int64_t id, const std::string& topic, Json body);
  void fail_pending();

  int fd_ = -1;
  std::string component_id_;
  Clock* clock_ = nullptr;
  std::unique_ptr<Clock> owned_clock_;

  std::mutex send_mu_;

  std::mutex state_mu_;
  std::condition_variable cv_;
  std::map<int64_t, std::shared_ptr<PendingCell>> pending_;
  std::vector<std::pair<std::string, std::function<void(const Message&)>>>
      subs_;
  std::map<std::string, std::function<Json(const Json&)>> handlers_;
  int64_t next_id_ = 1;

  std::atomic<bool> connected_{false};
  std::atomic<bool> closing_{false};
  std::atomic<bool> stalled_{false};
  std::atomic<bool> deaf_{false};
  std::function<void()> disconnect_handler_;
  std::thread reader_;
  std::thread heartbeat_;
  std::atomic<int64_t> hb_period_ms_{0};
};

}  // namespace cellkit::bus
