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

#include <optional>
#include <string>
#include <string_view>

namespace cellkit::bt {

// Result of ticking a node. IDLE exists only before the first tick and
// after a halt/reset; tick() never returns it.
enum class Status { IDLE, RUNNING, SUCCESS, FAILURE };

constexpr std::string_view to_string(Status s) {
  switch (s) {
    case Status::IDLE: return "IDLE";
    case Status::RUNNING: return "RUNNING";
    case Status::SUCCESS: return "SUCCESS";
    case Status::FAILURE: return "FAILURE";
  }
  return "IDLE";
}

inline std::optional<Status> status_from_string(std::string_view s) {
  if (s == "IDLE") return Status::IDLE;
  if (s == "RUNNING") return Status::RUNNING;
  if (s == "SUCCESS") return Status::SUCCESS;
  if (s == "FAILURE") return Status::FAILURE;
  return std::nullopt;
}

inline bool is_terminal(Status s) {
  return s == Status::SUCCESS || s == Status::FAILURE;
}

}  // namespace cellkit::bt
