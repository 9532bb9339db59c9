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

#include "cellkit/bt/trace.hpp"

#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace cellkit::bt {

std::string format_trace_line(const TraceEvent& e) {
  return fmt::format("{} {} {} {} {}", e.tick_index, e.node_path,
                     to_string(e.old_status), to_string(e.new_status),
                     e.timestamp_us);
}

TraceEvent parse_trace_line(const std::string& line) {
  std::istringstream in(line);
  TraceEvent e;
  std::string old_s;
  std::string new_s;
  std::string extra;
  if (!(in >> e.tick_index >> e.node_path >> old_s >> new_s >>
        e.timestamp_us)) {
    throw std::runtime_error("malformed trace line: " + line);
  }
  if (in >> extra) {
    throw std::runtime_error("trailing fields in trace line: " + line);
  }
  auto os = status_from_string(old_s);
  auto ns = status_from_string(new_s);
  if (!os || !ns) {
    throw std::runtime_error("unknown status in trace line: " + line);
  }
  e.old_status = *os;
  e.new_status = *ns;
  return e;
}

std::string format_trace(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += format_trace_line(e);
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> parse_trace(const std::string& text) {
  std::vector<TraceEvent> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_trace_line(line));
  }
  return out;
}

std::vector<std::pair<std::string, Status>> replay(
    const std::vector<TraceEvent>& events) {
  std::vector<std::pair<std::string, Status>> out;
  out.reserve(events.size());
  uint64_t last_tick = 0;
  for (const auto& e : events) {
    if (e.tick_index < last_tick) {
      throw std::runtime_error(
          fmt::format("trace tick_index out of order: {} after {}",
                      e.tick_index, last_tick));
    }
    last_tick = e.tick_index;
    out.emplace_back(e.node_path, e.new_status);
  }
  return out;
}

}  // namespace cellkit::bt
