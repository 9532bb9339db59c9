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

#include <array>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "cellkit/common/types.hpp"

namespace cellkit::sim {

// One row of a standard Denavit-Hartenberg table. The joint transform is
//   RotZ(theta_offset + q) * TransZ(d) * TransX(a) * RotX(alpha).
struct DhRow {
  double a = 0.0;             // link length, meters
  double alpha = 0.0;         // link twist, radians
  double d = 0.0;             // link offset, meters
  double theta_offset = 0.0;  // joint angle offset, radians
};

using DhTable = std::array<DhRow, kNumJoints>;

// Six-axis elbow arm used by the simulated cell. Reach is about 1.35 m;
// the zero configuration stretches the arm along +x with the wrist folded
// toward -y.
DhTable default_dh_table();

// Conservative reach bound: sum of |a| + |d| over all rows. No point
// farther than this from the base origin is attainable.
double workspace_radius(const DhTable& dh);

Eigen::Isometry3d dh_transform(const DhRow& row, double q);

// Tool pose in the base frame.
Eigen::Isometry3d fk(const DhTable& dh, const JointVector& q);
Pose6D fk_pose(const DhTable& dh, const JointVector& q);

// Geometric Jacobian in the base frame; rows 0-2 linear, rows 3-5 angular.
Eigen::Matrix<double, 6, 6> geometric_jacobian(const DhTable& dh,
                                               const JointVector& q);

// Twist taking `current` to `goal`: translation difference stacked on the
// rotation vector (axis times angle) of goal * current^-1.
Eigen::Matrix<double, 6, 1> pose_error(const Eigen::Isometry3d& goal,
                                       const Eigen::Isometry3d& current);

struct IkOptions {
  double tol_pos = 1e-6;  // meters
  double tol_rot = 1e-5;  // radians
  int max_iters = 500;
};

struct IkResult {
  bool ok = false;
  JointVector q;      // best configuration found
  int iters = 0;      // iterations consumed
  double pos_err = 0.0;
  double rot_err = 0.0;
};

// Damped least-squares inverse kinematics with a multiplicative damping
// schedule: accepted steps shrink the damping, rejected ones grow it.
// Goals farther than workspace_radius() from the origin are rejected
// without iterating.
IkResult ik(const DhTable& dh, const Pose6D& goal, const JointVector& seed,
            const IkOptions& opts = {});

Pose6D isometry_to_pose(const Eigen::Isometry3d& T);
Eigen::Isometry3d pose_to_isometry(const Pose6D& pose);

}  // namespace cellkit::sim
