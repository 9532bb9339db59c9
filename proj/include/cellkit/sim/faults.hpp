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
#include <vector>

#include "cellkit/common/rng.hpp"

namespace cellkit::sim {

enum class FaultMode {
  kCrash,              // process exits immediately
  kStall,              // heartbeats and request handling freeze; socket stays open
  kDeaf,               // heartbeats continue; service requests are dropped
  kFtNoise,            // force-torque noise sigma raised to `value`
  kPlannerFail,        // planner failure probability raised to `value`
  kControllerMissing,  // named controller drops off the advertised list
};

const char* fault_mode_name(FaultMode mode);
std::optional<FaultMode> parse_fault_mode(std::string_view name);

// When to fire: a one-shot wall of `at_s` on the component's sim clock, or a
// recurring stream with exponential inter-arrival times of mean
// `mean_period_s`. Exactly one of the two must be set.
struct FaultSpec {
  FaultMode mode = FaultMode::kCrash;
  double at_s = -1.0;
  double mean_period_s = -1.0;
  double value = 0.0;   // sigma for ft_noise, probability for planner_fail
  std::string detail;   // controller name for controller_missing
};

struct FaultEvent {
  FaultMode mode = FaultMode::kCrash;
  double t_s = 0.0;
  double value = 0.0;
  std::string detail;
};

// Arms every spec and replays due events as sim time advances. Recurring
// specs re-arm with a fresh exponential draw after each firing, so the
// inter-arrival sequence of one spec is i.i.d. exponential.
class FaultSchedule {
 public:
  FaultSchedule(const std::vector<FaultSpec>& specs, uint64_t seed);

  // Events that fire at or before `now_s`, oldest first.
  std::vector<FaultEvent> poll(double now_s);

  // Fire time of the soonest armed spec; empty when nothing is armed.
  std::optional<double> next_fire_s() const;

 private:
  struct Armed {
    FaultSpec spec;
    double next_s = -1.0;  // negative = disarmed
  };
  std::vector<Armed> armed_;
  Rng rng_;
};

}  // namespace cellkit::sim
