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

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "cellkit/sim/scenario.hpp"

namespace cellkit::sim {

// Exit codes shared by in-process and subprocess component runs.
inline constexpr int kExitClean = 0;
inline constexpr int kExitCrashFault = 3;    // scheduled crash fault fired
inline constexpr int kExitStartupFail = 4;   // dependency missing at startup
inline constexpr int kExitBrokerLost = 5;    // bus connection dropped

struct ComponentContext {
  ScenarioConfig cfg;
  // Instance name; must match an entry in cfg.components so the component
  // can find its fault schedule and start parameters.
  std::string name;
  uint16_t port = 0;
  // Shared CLOCK_MONOTONIC instant that is sim time zero. All components of
  // one run get the same epoch so their SimClocks agree across processes.
  int64_t epoch_wall_us = 0;
  // Cooperative stop for in-process runs; may be null.
  std::atomic<bool>* stop = nullptr;
  // When true a crash fault calls _exit() instead of returning, matching a
  // real process dying mid-flight.
  bool hard_exit = false;
};

// Runs one cell component to completion: connects to the broker, serves its
// svc/* topics, emits hb/<name> and log/<name>, applies its fault schedule.
// Blocks until stopped, crashed, or disconnected; returns an exit code.
//
// Kinds: world, arm, gripper, ft, camera, grasp_db, force_servo.
int run_component(const std::string& kind, const ComponentContext& ctx);

const std::vector<std::string>& component_kinds();

}  // namespace cellkit::sim
