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

#include <map>
#include <string>
#include <vector>

#include "cellkit/common/types.hpp"
#include "cellkit/sim/faults.hpp"
#include "cellkit/sim/planner.hpp"
#include "cellkit/sim/sensors.hpp"
#include "cellkit/sim/world.hpp"

namespace cellkit::sim {

struct BusConfig {
  int port = 0;  // 0 = whatever the broker picked (ephemeral)
  int heartbeat_period_ms = 100;
};

// One cell process: when it may start and which faults it carries.
struct ComponentConfig {
  std::string name;
  std::vector<std::string> depends_on;
  double start_delay_s = 0.0;  // after every dependency is ready
  std::vector<FaultSpec> faults;
};

// Everything a cell run needs: geometry, noise, keyframes, grasp database,
// process graph. Parsed from YAML; absent keys keep their defaults.
struct ScenarioConfig {
  uint64_t seed = 1;
  BusConfig bus;
  // Sim seconds per wall second. Everything downstream (heartbeat periods,
  // fault schedules, startup delays, uptime statistics) is expressed in sim
  // time, so runs at different scales are directly comparable.
  double time_scale = 1.0;
  double world_dt_s = 0.005;
  WorldParams world;
  PlanOptions plan;
  FtParams ft;
  CameraParams camera;
  std::map<std::string, JointVector> keyframes;
  std::map<std::string, GraspRecord> grasps;
  std::vector<ComponentConfig> components;
  // When set, the force-servo component skips waiting for the arm
  // description and dies at startup if the arm is not up yet.
  bool race_mode = false;
};

// The insertion cell: six-axis arm over a work surface with one bore, one
// peg-like housing, a wrist camera, and a force-torque sensor.
ScenarioConfig default_scenario();

ScenarioConfig parse_scenario_text(const std::string& yaml_text);
ScenarioConfig load_scenario(const std::string& path);

// Start order respecting depends_on edges; ties keep config order.
// Throws std::runtime_error on unknown dependencies or cycles.
std::vector<std::string> startup_order(
    const std::vector<ComponentConfig>& components);

const ComponentConfig* find_component(const ScenarioConfig& cfg,
                                      const std::string& name);

}  // namespace cellkit::sim
