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

#include "cellkit/bus/endpoint.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

namespace cellkit::bus {

namespace {

// steady_clock and wall_monotonic_us both read CLOCK_MONOTONIC on this
// platform, so a raw microsecond count converts directly to a wait target.
std::chrono::steady_clock::time_point wall_us_to_time_point(int64_t wall_us) {
  return std::chrono::steady_clock::time_point(
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::microseconds(wall_us)));
}

}  // namespace

std::unique_ptr<BusEndpoint> BusEndpoint::connect(
    uint16_t port, const std::string& component_id, Clock* clock) {
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("endpoint: socket() failed");

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(fd);
    throw std::runtime_error("endpoint: cannot reach broker on port " +
                             std::to_string(port));
  }
  const int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  auto ep = std::unique_ptr<BusEndpoint>(
      new BusEndpoint(fd, component_id, clock));
  ep->send_frame(Kind::Pub, 0, "_bus/hello",
                 Json{{"component", component_id}});
  return ep;
}

BusEndpoint::BusEndpoint(int fd, std::string component_id, Clock* clock)
    : fd_(fd), component_id_(std::move(component_id)), clock_(clock) {
  if (!clock_) {
    owned_clock_ = std::make_unique<SimClock>(SimClock::real_time());
    clock_ = owned_clock_.get();
  }
  connected_ = true;
  reader_ = std::thread([this] { reader_loop(); });
}

BusEndpoint::~BusEndpoint() { close(); }

void BusEndpoint::close() {
  if (closing_.exchange(true)) {
    if (reader_.joinable()) reader_.join();
    if (heartbeat_.joinable()) heartbeat_.join();
    return;
  }
  shutdown(fd_, SHUT_RDWR);
  if (reader_.joinable()) reader_.join();
  if (heartbeat_.joinable()) heartbeat_.join();
  ::close(fd_);
  fd_ = -1;
}

void BusEndpoint::send_frame(Kind kind, int64_t id, const std::string& topic,
                             Json body) {
  Message m;
  m.kind = kind;
  m.id = id;
  m.topic = topic;
  m.ts_us = clock_->now_us();
  // A default-constructed Json is null; the wire format wants an object.
  m.body = body.is_null() ? Json::object() : std::move(body);
  const std::string bytes = encode_message(m);

  std::lock_guard lk(send_mu_);
  size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = write(fd_, bytes.data() + off, bytes.size() - off);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      connected_ = false;
      return;
    }
    off += static_cast<size_t>(n);
  }
}

void BusEndpoint::publish(const std::string& topic, Json body) {
  int64_t id;
  {
    std::lock_guard lk(state_mu_);
    id = next_id_++;
  }
  send_frame(Kind::Pub, id, topic, std::move(body));
}

void BusEndpoint::subscribe(const std::string& pattern,
                            std::function<void(const Message&)> cb) {
  {
    std::lock_guard lk(state_mu_);
    subs_.emplace_back(pattern, std::move(cb));
  }
  // Round-trip through the broker so the subscription is live on return.
  const ReplyResult r =
      request("_bus/subscribe", Json{{"pattern", pattern}}, 5000);
  if (r.timed_out) {
    throw std::runtime_error("endpoint: subscribe not acknowledged");
  }
}

void BusEndpoint::advertise(const std::string& service_topic,
                            std::function<Json(const Json&)> handler) {
  {
    std::lock_guard lk(state_mu_);
    handlers_[service_topic] = std::move(handler);
  }
  const ReplyResult r =
      request("_bus/subscribe", Json{{"pattern", service_topic}}, 5000);
  if (r.timed_out) {
    throw std::runtime_error("endpoint: advertise not acknowledged");
  }
}

ReplyResult BusEndpoint::request(const std::string& service_topic, Json body,
                                 int64_t timeout_ms) {
  if (timeout_ms <= 0) {
    throw std::invalid_argument("request: timeout must be positive");
  }
  auto cell = std::make_shared<PendingCell>();
  int64_t id;
  {
    std::lock_guard lk(state_mu_);
    id = next_id_++;
    pending_[id] = cell;
  }
  send_frame(Kind::Req, id, service_topic, std::move(body));

  const int64_t deadline_us = clock_->now_us() + timeout_ms * 1000;
  const auto wall_deadline =
      wall_us_to_time_point(clock_->to_wall_us(deadline_us));

  std::unique_lock lk(state_mu_);
  cv_.wait_until(lk, wall_deadline, [&] { return cell->done; });

  ReplyResult out;
  if (cell->done) {
    out.timed_out = false;
    out.body = std::move(cell->body);
  }
  pending_.erase(id);
  return out;
}

BusEndpoint::AsyncRequest BusEndpoint::request_async(
    const std::string& service_topic, Json body, int64_t timeout_ms) {
  if (timeout_ms <= 0) {
    throw std::invalid_argument("request_async: timeout must be positive");
  }
  AsyncRequest req;
  req.cell = std::make_shared<PendingCell>();
  {
    std::lock_guard lk(state_mu_);
    req.id = next_id_++;
    pending_[req.id] = req.cell;
  }
  req.deadline_us = clock_->now_us() + timeout_ms * 1000;
  send_frame(Kind::Req, req.id, service_topic, std::move(body));
  return req;
}

std::optional<ReplyResult> BusEndpoint::poll_async(AsyncRequest& req) {
  if (!req.cell) return std::nullopt;
  std::lock_guard lk(state_mu_);
  if (req.cell->done) {
    ReplyResult r;
    r.timed_out = false;
    r.body = std::move(req.cell->body);
    pending_.erase(req.id);
    req.cell.reset();
    return r;
  }
  if (clock_->now_us() >= req.deadline_us) {
    pending_.erase(req.id);
    req.cell.reset();
    return ReplyResult{};
  }
  return std::nullopt;
}

void BusEndpoint::cancel_async(AsyncRequest& req) {
  if (!req.cell) return;
  std::lock_guard lk(state_mu_);
  pending_.erase(req.id);
  req.cell.reset();
}

void BusEndpoint::start_heartbeats(int64_t period_ms) {
  if (period_ms < 10) {
    throw std::invalid_argument("heartbeat period must be at least 10 ms");
  }
  if (heartbeat_.joinable()) return;
  hb_period_ms_ = period_ms;
  heartbeat_ = std::thread([this, period_ms] { heartbeat_loop(period_ms); });
}

void BusEndpoint::heartbeat_loop(int64_t period_ms) {
  const std::string topic = "hb/" + component_id_;
  int64_t seq = 0;
  int64_t next_us = clock_->now_us();
  while (!closing_ && connected_) {
    if (!stalled_) {
      ++seq;
      send_frame(Kind::Hb, seq, topic,
                 Json{{"seq", seq}, {"period_ms", period_ms}});
    }
    next_us += period_ms * 1000;
    clock_->sleep_until_us(next_us);
  }
}

void BusEndpoint::set_disconnect_handler(std::function<void()> cb) {
  std::lock_guard lk(state_mu_);
  disconnect_handler_ = std::move(cb);
}

void BusEndpoint::reader_loop() {
  std::string rbuf;
  char buf[16384];
  while (true) {
    const ssize_t n = read(fd_, buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    rbuf.append(buf, static_cast<size_t>(n));

    size_t start = 0;
    while (true) {
      const size_t nl = rbuf.find('\n', start);
      if (nl == std::string::npos) break;
      const std::string line = rbuf.substr(start, nl - start);
      start = nl + 1;
      try {
        dispatch(decode_message(line));
      } catch (const ProtocolError& e) {
        publish("log/" + component_id_,
                Json{{"line", std::string("protocol error: ") + e.what()}});
      }
    }
    rbuf.erase(0, start);
  }

  connected_ = false;
  fail_pending();
  std::function<void()> handler;
  {
    std::lock_guard lk(state_mu_);
    handler = disconnect_handler_;
  }
  if (handler && !closing_) handler();
}

void BusEndpoint::fail_pending() {
  // Cells stay done=false; waiters run out their deadline and report a
  // timeout, the same shape a dead provider produces.
  std::lock_guard lk(state_mu_);
  cv_.notify_all();
}

void BusEndpoint::dispatch(const Message& m) {
  switch (m.kind) {
    case Kind::Rep: {
      std::lock_guard lk(state_mu_);
      auto it = pending_.find(m.id);
      if (it == pending_.end()) return;  // reply after timeout, drop
      it->second->done = true;
      it->second->body = m.body;
      cv_.notify_all();
      return;
    }
    case Kind::Req: {
      if (stalled_ || deaf_) return;  // the caller runs out its timeout
      std::function<Json(const Json&)> handler;
      {
        std::lock_guard lk(state_mu_);
        for (auto& [topic, h] : handlers_) {
          if (topic_matches(topic, m.topic)) {
            handler = h;
            break;
          }
        }
      }
      if (!handler) return;
      try {
        Json reply = handler(m.body);
        send_frame(Kind::Rep, m.id, m.topic, std::move(reply));
      } catch (const std::exception& e) {
        publish("log/" + component_id_,
                Json{{"line", "service " + m.topic + " handler error: " +
                                  e.what()}});
      }
      return;
    }
    case Kind::Pub:
    case Kind::Hb: {
      std::vector<std::function<void(const Message&)>> cbs;
      {
        std::lock_guard lk(state_mu_);
        for (auto& [pattern, cb] : subs_) {
          if (topic_matches(pattern, m.topic)) cbs.push_back(cb);
        }
      }
      for (auto& cb : cbs) cb(m);
      return;
    }
  }
}

}  // namespace cellkit::bus
