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

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "cellkit/bus/message.hpp"

namespace cellkit::bus {

// Message router. Components connect over local TCP and exchange frames;
// the broker fans out pub/hb frames to matching subscriptions, forwards a
// req to the provider of its service topic, and routes the rep back to the
// requester.
//
// Control traffic rides on reserved topics under "_bus/":
//   _bus/hello      body {component}        names the connection
//   _bus/subscribe  body {pattern}          adds a subscription
//
// Requests are correlated across connections by id rewriting: each
// forwarded req gets a broker-unique id, and the provider's rep is mapped
// back to the original id before returning to the requester. Both sides
// therefore see rep.id equal to the id of their own req.
//
// Connection lifecycle is announced on topic "log/broker" with body
// {event: connected|disconnected, component}. The watchdog treats a
// disconnect of a monitored component as a crash signal.
class Broker {
 public:
  // port 0 picks an ephemeral port; see port() for the actual one.
  explicit Broker(uint16_t port);
  ~Broker();

  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  uint16_t port() const { return port_; }

  // Serves until stop(). start() runs serve() on an internal thread and
  // returns once the socket is accepting.
  void start();
  void serve();
  void stop();

 private:
  struct Conn;

  void accept_clients();
  void handle_readable(Conn& c);
  void handle_line(Conn& c, const std::string& line);
  void route(const Message& m, int origin_fd);
  void send_to(Conn& c, const std::string& bytes);
  void flush(Conn& c);
  void sweep_dead();
  void announce(const std::string& event, const std::string& component);

  struct Pending {
    int origin_fd = -1;
    int64_t original_id = 0;
  };

  uint16_t port_ = 0;
  int listen_fd_ = -1;
  int wake_fds_[2] = {-1, -1};
  std::map<int, std::unique_ptr<Conn>> conns_;
  std::map<int64_t, Pending> pending_;
  int64_t next_wire_id_ = 1;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace cellkit::bus
