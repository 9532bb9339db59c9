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

#include "cellkit/bus/message.hpp"

#include <cctype>
#include <cstdlib>

namespace cellkit::bus {

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::Pub: return "pub";
    case Kind::Req: return "req";
    case Kind::Rep: return "rep";
    case Kind::Hb: return "hb";
  }
  return "?";
}

namespace {

bool valid_topic(const std::string& t) {
  if (t.empty()) return false;
  for (unsigned char c : t) {
    if (c > 0x7E || c <= 0x20) return false;
  }
  return true;
}

}  // namespace

std::string encode_message(const Message& m) {
  Json j;
  j["v"] = m.v;
  j["kind"] = kind_name(m.kind);
  j["id"] = m.id;
  j["topic"] = m.topic;
  j["ts_us"] = m.ts_us;
  j["body"] = m.body;
  return j.dump() + "\n";
}

Message decode_message(std::string_view line) {
  std::string raw(line);
  while (!raw.empty() && (raw.back() == '\n' || raw.back() == '\r')) {
    raw.pop_back();
  }

  Json j = Json::parse(raw, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("invalid JSON", raw);
  if (!j.is_object()) throw ProtocolError("frame is not an object", raw);

  static const char* required[] = {"v", "kind", "id", "topic", "ts_us", "body"};
  for (const char* key : required) {
    if (!j.contains(key)) {
      throw ProtocolError(std::string("missing key ") + key, raw);
    }
  }
  if (j.size() != 6) throw ProtocolError("unexpected extra keys", raw);

  Message m;
  if (!j["v"].is_number_integer()) throw ProtocolError("v is not an integer", raw);
  m.v = j["v"].get<int>();
  if (m.v != 1) throw ProtocolError("unsupported protocol version", raw);

  if (!j["kind"].is_string()) throw ProtocolError("kind is not a string", raw);
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "pub") {
    m.kind = Kind::Pub;
  } else if (kind == "req") {
    m.kind = Kind::Req;
  } else if (kind == "rep") {
    m.kind = Kind::Rep;
  } else if (kind == "hb") {
    m.kind = Kind::Hb;
  } else {
    throw ProtocolError("unknown kind '" + kind + "'", raw);
  }

  if (!j["id"].is_number_integer()) {
    throw ProtocolError("id is not an integer", raw);
  }
  m.id = j["id"].get<int64_t>();

  if (!j["topic"].is_string()) throw ProtocolError("topic is not a string", raw);
  m.topic = j["topic"].get<std::string>();
  if (!valid_topic(m.topic)) throw ProtocolError("bad topic", raw);

  if (!j["ts_us"].is_number_integer()) {
    throw ProtocolError("ts_us is not an integer", raw);
  }
  m.ts_us = j["ts_us"].get<int64_t>();

  if (!j["body"].is_object()) throw ProtocolError("body is not an object", raw);
  m.body = j["body"];
  return m;
}

bool topic_matches(const std::string& pattern, const std::string& topic) {
  if (pattern == topic) return true;
  if (pattern.size() >= 2 && pattern.compare(pattern.size() - 2, 2, "/*") == 0) {
    const size_t prefix_len = pattern.size() - 1;  // keep the '/'
    return topic.size() > prefix_len &&
           topic.compare(0, prefix_len, pattern, 0, prefix_len) == 0;
  }
  return false;
}

uint16_t default_port() {
  if (const char* env = std::getenv(kPortEnvVar)) {
    const long p = std::strtol(env, nullptr, 10);
    if (p > 0 && p < 65536) return static_cast<uint16_t>(p);
  }
  return kDefaultPort;
}

}  // namespace cellkit::bus
