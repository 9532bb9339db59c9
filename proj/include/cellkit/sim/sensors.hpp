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

#include "cellkit/common/rng.hpp"
#include "cellkit/common/types.hpp"

namespace cellkit::sim {

// Force-torque sensing: the true wrench plus independent zero-mean Gaussian
// noise on every axis.
struct FtParams {
  double sigma_force = 0.1;    // newtons, per axis
  double sigma_torque = 0.01;  // newton-meters, per axis
};

Wrench sample_wrench(const Wrench& truth, const FtParams& params, Rng& rng);

// Wrist camera: objects are visible inside a cone opening along the tool
// z axis. Detections fire with probability p_detect and carry Gaussian
// pose noise.
struct CameraParams {
  double half_angle_deg = 35.0;
  double range = 1.2;          // meters
  double p_detect = 0.9;
  double sigma_pos = 5e-4;     // meters, per axis
  double sigma_rot_deg = 0.5;  // degrees, about a uniform random axis
};

bool in_view(const Pose6D& camera_pose, const Eigen::Vector3d& point,
             const CameraParams& params);

// One detection attempt against the true pose; empty when the object is out
// of view or the Bernoulli draw misses.
std::optional<Pose6D> sample_detection(const Pose6D& camera_pose,
                                       const Pose6D& true_pose,
                                       const CameraParams& params, Rng& rng);

}  // namespace cellkit::sim
