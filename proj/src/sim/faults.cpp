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

#include "cellkit/sim/faults.hpp"

#include <algorithm>

namespace cellkit::sim {

const char* fault_mode_name(FaultMode mode) {
  switch (mode) {
    case FaultMode::kCrash: return "crash";
    case FaultMode::kStall: return "stall";
    case FaultMode::kDeaf: return "deaf";
    case FaultMode::kFtNoise: return "ft_noise";
    case FaultMode::kPlannerFail: return "planner_fail";
    case FaultMode::kControllerMissing: return "controller_missing";
  }
  return "?";
}

std::optional<FaultMode> parse_fault_mode(std::string_view name) {
  if (name == "crash") return FaultMode::kCrash;
  if (name == "stall") return FaultMode::kStall;
  if (name == "deaf") return FaultMode::kDeaf;
  if (name == "ft_noise") return FaultMode::kFtNoise;
  if (name == "planner_fail") return FaultMode::kPlannerFail;
  if (name == "controller_missing") return FaultMode::kControllerMissing;
  return std::nullopt;
}

FaultSchedule::FaultSchedule(const std::vector<FaultSpec>& specs,
                             uint64_t seed)
    : rng_(seed) {
  for (const FaultSpec& spec : specs) {
    Armed armed;
    armed.spec = spec;
    if (spec.at_s >= 0.0) {
      armed.next_s = spec.at_s;
    } else if (spec.mean_period_s > 0.0) {
      armed.next_s = rng_.exponential(1.0 / spec.mean_period_s);
    }
    armed_.push_back(std::move(armed));
  }
}

std::vector<FaultEvent> FaultSchedule::poll(double now_s) {
  std::vector<FaultEvent> out;
  for (Armed& armed : armed_) {
    while (armed.next_s >= 0.0 && armed.next_s <= now_s) {
      FaultEvent ev;
      ev.mode = armed.spec.mode;
      ev.t_s = armed.next_s;
      ev.value = armed.spec.value;
      ev.detail = armed.spec.detail;
      out.push_back(std::move(ev));
      if (armed.spec.mean_period_s > 0.0 && armed.spec.at_s < 0.0) {
        armed.next_s += rng_.exponential(1.0 / armed.spec.mean_period_s);
      } else {
        armed.next_s = -1.0;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FaultEvent& a, const FaultEvent& b) { return a.t_s < b.t_s; });
  return out;
}

std::optional<double> FaultSchedule::next_fire_s() const {
  std::optional<double> best;
  for (const Armed& armed : armed_) {
    if (armed.next_s >= 0.0 && (!best || armed.next_s < *best)) {
      best = armed.next_s;
    }
  }
  return best;
}

}  // namespace cellkit::sim
