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
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace cellkit::bus {

// Key order on the wire is fixed, so encoded messages are byte-stable and
// can be compared and grepped in logs.
using Json = nlohmann::ordered_json;

enum class Kind { Pub, Req, Rep, Hb };

std::string_view kind_name(Kind k);

// One bus frame. Encoded as a single UTF-8 JSON line terminated by '\n'
// with keys exactly v, kind, id, topic, ts_us, body.
//
//   v      protocol version, always 1
//   kind   pub | req | rep | hb
//   id     64-bit correlation integer; a rep carries the id of its req,
//          a hb carries its seq
//   topic  non-empty ASCII without whitespace
//   ts_us  sender's clock in microseconds
//   body   JSON object payload
struct Message {
  int v = 1;
  Kind kind = Kind::Pub;
  int64_t id = 0;
  std::string topic;
  int64_t ts_us = 0;
  Json body = Json::object();

  bool operator==(const Message& o) const {
    return v == o.v && kind == o.kind && id == o.id && topic == o.topic &&
           ts_us == o.ts_us && body == o.body;
  }
};

// Raised by decode_message; keeps the offending line for log forensics.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& what, std::string line)
      : std::runtime_error(what + ": " + line), line_(std::move(line)) {}

  const std::string& offending_line() const { return line_; }

 private:
  std::string line_;
};

std::string encode_message(const Message& m);

// Accepts one line with or without the trailing '\n'. Rejects anything
// that is not exactly a well-formed frame: bad JSON, missing or extra
// keys, unknown kind, wrong field types, bad topic.
Message decode_message(std::string_view line);

// True when `topic` matches `pattern`: either equal, or pattern is
// "prefix/*" and topic is prefix plus a non-empty suffix.
bool topic_matches(const std::string& pattern, const std::string& topic);

// Broker TCP port: CELLKIT_PORT from the environment, else 7471.
uint16_t default_port();

inline constexpr uint16_t kDefaultPort = 7471;
inline constexpr const char* kPortEnvVar = "CELLKIT_PORT";

}  // namespace cellkit::bus
