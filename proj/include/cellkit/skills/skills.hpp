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

#include <memory>

#include "cellkit/bt/behavior.hpp"
#include "cellkit/bus/endpoint.hpp"

namespace cellkit::skills {

// Shared per-cell state the skill leaves act through. One host serves all
// leaves of one executor instance; the endpoint outlives the tree.
struct SkillHost {
  bus::BusEndpoint* endpoint = nullptr;
  // Configured force-sensor noise (1 sigma, newtons). Thresholds are
  // checked against a 3 sigma floor so contact decisions sit above the
  // noise; an unannounced increase at runtime (a faulty sensor) is
  // deliberately not reflected here.
  double sigma_force = 0.0;
};

// Noise floor used by the contact skills.
inline double noise_floor(const SkillHost& host) {
  return 3.0 * host.sigma_force;
}

// Sim-time budget for one service round trip. Providers answer within a
// couple of loop periods; a silent peer costs this much per attempt.
inline constexpr int64_t kRequestTimeoutMs = 250;

// Motion defaults. All overridable per leaf via XML attributes.
inline constexpr double kApproachSpeed = 0.005;      // m/s, MoveUntilFF
inline constexpr double kSpiralPitch = 0.001;        // m per turn
inline constexpr double kSpiralMaxRadius = 0.008;    // m
inline constexpr double kSpiralSpeed = 0.005;        // m/s tangential
inline constexpr double kSpiralContactForce = 3.0;   // N against the plane
inline constexpr double kInsertTiltDeg = 2.0;        // push angle
inline constexpr int kInsertStepMs = 10;             // control period
inline constexpr double kInsertSeatForce = 10.0;     // N, seat detection
inline constexpr double kInsertSpeed = 0.003;        // m/s nominal descent
inline constexpr double kInsertMinDepth = 0.010;     // m commanded descent
                                                     // before a seat force
                                                     // counts as seated

// Registers the action and condition leaves on the registry:
//   Actions: MoveJoint, MoveEE, Grasp, MoveUntilFF, SearchAlign, NJInsert,
//            EstimatePose, ComputeGrasp
//   Conditions: CheckCondition (predicates: has_key, lacks_key, flag)
// Every instance shares the host.
void register_skills(bt::Registry& registry, std::shared_ptr<SkillHost> host);

}  // namespace cellkit::skills
