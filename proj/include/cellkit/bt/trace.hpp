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
#include <string>
#include <vector>

#include "cellkit/bt/status.hpp"

namespace cellkit::bt {

// One node status change. Serialized one per line as
//   tick_index node_path old_status new_status timestamp_us
struct TraceEvent {
  uint64_t tick_index = 0;
  std::string node_path;
  Status old_status = Status::IDLE;
  Status new_status = Status::IDLE;
  int64_t timestamp_us = 0;

  bool operator==(const TraceEvent&) const = default;
};

std::string format_trace_line(const TraceEvent& e);

// Throws std::runtime_error on malformed lines.
TraceEvent parse_trace_line(const std::string& line);

std::string format_trace(const std::vector<TraceEvent>& events);
std::vector<TraceEvent> parse_trace(const std::string& text);

// Deterministic reproduction of the status-change sequence. Validates that
// tick_index is non-decreasing; throws std::runtime_error otherwise.
std::vector<std::pair<std::string, Status>> replay(
    const std::vector<TraceEvent>& events);

}  // namespace cellkit::bt
