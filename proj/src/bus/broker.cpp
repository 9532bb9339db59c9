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

#include "cellkit/bus/broker.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "cellkit/common/clock.hpp"

namespace cellkit::bus {

namespace {

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

struct Broker::Conn {
  int fd = -1;
  std::string component = "?";
  std::vector<std::string> patterns;
  std::string rbuf;
  std::string wbuf;
  // Newest matching subscriber wins service routing, so a restarted
  // provider displaces its dead predecessor.
  int64_t order = 0;
  // Failed connections are only flagged here; sweep_dead() removes them
  // outside of any iteration over the connection table.
  bool dead = false;
};

Broker::Broker(uint16_t port) {
  listen_fd_ = socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("broker: socket() failed");
  const int one = 1;
  setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    close(listen_fd_);
    throw std::runtime_error(std::string("broker: bind() failed: ") +
                             std::strerror(errno));
  }
  if (listen(listen_fd_, 64) < 0) {
    close(listen_fd_);
    throw std::runtime_error("broker: listen() failed");
  }

  socklen_t len = sizeof(addr);
  getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  set_nonblocking(listen_fd_);
  if (pipe(wake_fds_) != 0) {
    close(listen_fd_);
    throw std::runtime_error("broker: pipe() failed");
  }
  set_nonblocking(wake_fds_[0]);
}

Broker::~Broker() {
  stop();
  if (listen_fd_ >= 0) close(listen_fd_);
  for (int fd : wake_fds_) {
    if (fd >= 0) close(fd);
  }
  for (auto& [fd, c] : conns_) close(fd);
}

void Broker::start() {
  thread_ = std::thread([this] { serve(); });
}

void Broker::stop() {
  stopping_ = true;
  if (wake_fds_[1] >= 0) {
    const char b = 'x';
    [[maybe_unused]] ssize_t n = write(wake_fds_[1], &b, 1);
  }
  if (thread_.joinable()) thread_.join();
}

void Broker::serve() {
  while (!stopping_) {
    std::vector<pollfd> fds;
    fds.push_back({listen_fd_, POLLIN, 0});
    fds.push_back({wake_fds_[0], POLLIN, 0});
    for (auto& [fd, c] : conns_) {
      short events = POLLIN;
      if (!c->wbuf.empty()) events |= POLLOUT;
      fds.push_back({fd, events, 0});
    }

    const int rc = poll(fds.data(), fds.size(), 500);
    if (stopping_) break;
    if (rc <= 0) continue;

    if (fds[0].revents & POLLIN) accept_clients();
    if (fds[1].revents & POLLIN) {
      char buf[16];
      while (read(wake_fds_[0], buf, sizeof(buf)) > 0) {
      }
    }

    for (size_t i = 2; i < fds.size(); ++i) {
      auto it = conns_.find(fds[i].fd);
      if (it == conns_.end() || it->second->dead) continue;
      if (fds[i].revents & POLLOUT) flush(*it->second);
      // Readable comes before the hangup flags: a closed peer may still
      // have final frames waiting in the socket buffer.
      if (fds[i].revents & POLLIN) {
        handle_readable(*it->second);
      } else if (fds[i].revents & (POLLERR | POLLHUP | POLLNVAL)) {
        it->second->dead = true;
      }
    }
    sweep_dead();
  }

  // Close client sockets so endpoint reader threads see EOF promptly.
  for (auto& [fd, c] : conns_) close(fd);
  conns_.clear();
}

void Broker::accept_clients() {
  while (true) {
    const int fd = accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;
    set_nonblocking(fd);
    const int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    auto conn = std::make_unique<Conn>();
    conn->fd = fd;
    conns_[fd] = std::move(conn);
  }
}

void Broker::handle_readable(Conn& c) {
  // A peer may write its last frames and close in one burst; those frames
  // are still owed delivery, so the buffer is parsed before the connection
  // is declared dead.
  bool saw_eof = false;
  while (true) {
    char buf[16384];
    const ssize_t n = read(c.fd, buf, sizeof(buf));
    if (n > 0) {
      c.rbuf.append(buf, static_cast<size_t>(n));
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) break;
    saw_eof = true;
    break;
  }

  size_t start = 0;
  while (!c.dead) {
    const size_t nl = c.rbuf.find('\n', start);
    if (nl == std::string::npos) break;
    const std::string line = c.rbuf.substr(start, nl - start);
    start = nl + 1;
    handle_line(c, line);
  }
  c.rbuf.erase(0, start);
  if (saw_eof) c.dead = true;
}

void Broker::handle_line(Conn& c, const std::string& line) {
  Message m;
  try {
    m = decode_message(line);
  } catch (const ProtocolError&) {
    c.dead = true;
    return;
  }

  if (m.topic.rfind("_bus/", 0) == 0) {
    if (m.topic == "_bus/hello" && m.body.contains("component")) {
      c.component = m.body["component"].get<std::string>();
      announce("connected", c.component);
    } else if (m.topic == "_bus/subscribe" && m.body.contains("pattern")) {
      c.patterns.push_back(m.body["pattern"].get<std::string>());
      c.order = next_wire_id_++;
      if (m.kind == Kind::Req) {
        // Ack directly so subscribe() can block until the pattern is live.
        Message ack;
        ack.kind = Kind::Rep;
        ack.id = m.id;
        ack.topic = m.topic;
        ack.ts_us = m.ts_us;
        ack.body = Json{{"ok", true}};
        send_to(c, encode_message(ack));
      }
    }
    return;
  }
  route(m, c.fd);
}

void Broker::route(const Message& m, int origin_fd) {
  switch (m.kind) {
    case Kind::Pub:
    case Kind::Hb: {
      const std::string bytes = encode_message(m);
      for (auto& [fd, c] : conns_) {
        if (c->dead) continue;
        for (const auto& p : c->patterns) {
          if (topic_matches(p, m.topic)) {
            send_to(*c, bytes);
            break;
          }
        }
      }
      return;
    }
    case Kind::Req: {
      Conn* provider = nullptr;
      for (auto& [fd, c] : conns_) {
        if (fd == origin_fd || c->dead) continue;
        for (const auto& p : c->patterns) {
          if (topic_matches(p, m.topic)) {
            if (!provider || c->order > provider->order) provider = c.get();
            break;
          }
        }
      }
      // No provider: drop, the requester's timeout is the contract.
      if (!provider) return;
      Message fwd = m;
      fwd.id = next_wire_id_++;
      pending_[fwd.id] = Pending{origin_fd, m.id};
      send_to(*provider, encode_message(fwd));
      return;
    }
    case Kind::Rep: {
      auto it = pending_.find(m.id);
      if (it == pending_.end()) return;  // requester gone or duplicate rep
      const Pending p = it->second;
      pending_.erase(it);
      auto conn = conns_.find(p.origin_fd);
      if (conn == conns_.end() || conn->second->dead) return;
      Message back = m;
      back.id = p.original_id;
      send_to(*conn->second, encode_message(back));
      return;
    }
  }
}

void Broker::send_to(Conn& c, const std::string& bytes) {
  if (c.wbuf.empty()) {
    ssize_t n = write(c.fd, bytes.data(), bytes.size());
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) n = 0;
    if (n < 0) {
      c.dead = true;
      return;
    }
    if (static_cast<size_t>(n) < bytes.size()) {
      c.wbuf.append(bytes, static_cast<size_t>(n),
                    bytes.size() - static_cast<size_t>(n));
    }
    return;
  }
  c.wbuf += bytes;
}

void Broker::flush(Conn& c) {
  while (!c.wbuf.empty()) {
    const ssize_t n = write(c.fd, c.wbuf.data(), c.wbuf.size());
    if (n > 0) {
      c.wbuf.erase(0, static_cast<size_t>(n));
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) return;
    c.dead = true;
    return;
  }
}

void Broker::sweep_dead() {
  while (true) {
    int fd = -1;
    for (auto& [f, c] : conns_) {
      if (c->dead) {
        fd = f;
        break;
      }
    }
    if (fd < 0) return;

    auto it = conns_.find(fd);
    const std::string component = it->second->component;
    close(fd);
    conns_.erase(it);
    // Replies owed to this connection can never be delivered.
    for (auto p = pending_.begin(); p != pending_.end();) {
      p = p->second.origin_fd == fd ? pending_.erase(p) : std::next(p);
    }
    // May flag further connections; the outer loop picks them up.
    announce("disconnected", component);
  }
}

void Broker::announce(const std::string& event, const std::string& component) {
  Message m;
  m.kind = Kind::Pub;
  m.id = next_wire_id_++;
  m.topic = "log/broker";
  m.ts_us = wall_monotonic_us();
  m.body = Json{{"event", event}, {"component", component}};
  route(m, -1);
}

}  // namespace cellkit::bus
