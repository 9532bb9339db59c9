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

#include <string>

#include <Eigen/Dense>

#include "cellkit/common/rng.hpp"
#include "cellkit/common/types.hpp"
#include "cellkit/sim/kinematics.hpp"

namespace cellkit::sim {

// Straight-line joint-space trajectory, linearly interpolated over a fixed
// duration. The duration is chosen so every joint stays under its velocity
// limit.
struct Trajectory {
  JointVector from;
  JointVector to;
  double duration_s = 0.0;

  // Configuration at `t` seconds after the start; clamped at the endpoints.
  JointVector sample(double t) const;
};

struct PlanOptions {
  // Per-joint velocity limits, rad/s.
  Eigen::Matrix<double, kNumJoints, 1> vmax =
      Eigen::Matrix<double, kNumJoints, 1>::Constant(1.5);
  double min_duration_s = 0.05;
  // Probability that the planner reports failure instead of a trajectory.
  double fail_probability = 0.0;
};

struct PlanResult {
  bool ok = false;
  Trajectory traj;
  std::string reason;
};

// Plans a joint-space move. Draws one Bernoulli sample from `rng` when
// fail_probability > 0; a failed draw aborts the plan.
PlanResult plan_move(const JointVector& from, const JointVector& to,
                     const PlanOptions& opts, Rng& rng);

// Solves IK for `goal` seeded at `from`, then plans toward the solution.
PlanResult plan_to_pose(const DhTable& dh, const JointVector& from,
                        const Pose6D& goal, const PlanOptions& opts, Rng& rng);

}  // namespace cellkit::sim
