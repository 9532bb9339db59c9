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
#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace cellkit {

inline constexpr int kNumJoints = 6;

// Rigid transform, stored as translation + unit quaternion.
struct Pose6D {
  Eigen::Vector3d position{0.0, 0.0, 0.0};
  Eigen::Quaterniond orientation{1.0, 0.0, 0.0, 0.0};  // w, x, y, z

  // Composition: result maps a point through `other` first, then `this`.
  Pose6D compose(const Pose6D& other) const {
    Pose6D out;
    out.position = position + orientation * other.position;
    out.orientation = (orientation * other.orientation).normalized();
    return out;
  }

  Pose6D inverse() const {
    Pose6D out;
    out.orientation = orientation.conjugate();
    out.position = -(out.orientation * position);
    return out;
  }

  double translation_distance(const Pose6D& other) const {
    return (position - other.position).norm();
  }

  // Angle of the relative rotation, in radians.
  double rotation_distance(const Pose6D& other) const {
    double d = std::abs(orientation.normalized().dot(other.orientation.normalized()));
    d = std::min(d, 1.0);
    return 2.0 * std::acos(d);
  }

  static Pose6D identity() { return Pose6D{}; }
};

// Joint-space configuration of the six-axis arm, radians.
struct JointVector {
  Eigen::Matrix<double, kNumJoints, 1> q = Eigen::Matrix<double, kNumJoints, 1>::Zero();

  double distance(const JointVector& other) const { return (q - other.q).norm(); }
};

// Cartesian wrench at the tool flange. Newtons / Newton-meters. The frame
// is chosen by the producer; the simulated cell reports world-frame values.
struct Wrench {
  Eigen::Vector3d force{0.0, 0.0, 0.0};
  Eigen::Vector3d torque{0.0, 0.0, 0.0};

  double force_magnitude() const { return force.norm(); }
};

// One entry of the grasp database: how to hold a named object.
struct GraspRecord {
  std::string object_name;
  Pose6D grasp_pose_in_object;  // gripper frame relative to the object frame
  double closure = 0.0;         // commanded closure fraction in [0, 1]
};

}  // namespace cellkit
