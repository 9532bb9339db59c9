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

#include "cellkit/sim/sensors.hpp"

#include <cmath>

namespace cellkit::sim {

Wrench sample_wrench(const Wrench& truth, const FtParams& params, Rng& rng) {
  Wrench out;
  for (int i = 0; i < 3; ++i) {
    out.force[i] = truth.force[i] + rng.normal(0.0, params.sigma_force);
    out.torque[i] = truth.torque[i] + rng.normal(0.0, params.sigma_torque);
  }
  return out;
}

bool in_view(const Pose6D& camera_pose, const Eigen::Vector3d& point,
             const CameraParams& params) {
  const Eigen::Vector3d axis =
      camera_pose.orientation * Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d to_point = point - camera_pose.position;
  const double dist = to_point.norm();
  if (dist < 1e-9 || dist > params.range) {
    return false;
  }
  const double cos_angle = axis.dot(to_point) / dist;
  return cos_angle >= std::cos(params.half_angle_deg * M_PI / 180.0);
}

std::optional<Pose6D> sample_detection(const Pose6D& camera_pose,
                                       const Pose6D& true_pose,
                                       const CameraParams& params, Rng& rng) {
  if (!in_view(camera_pose, true_pose.position, params)) {
    return std::nullopt;
  }
  if (!rng.bernoulli(params.p_detect)) {
    return std::nullopt;
  }
  Pose6D noisy = true_pose;
  for (int i = 0; i < 3; ++i) {
    noisy.position[i] += rng.normal(0.0, params.sigma_pos);
  }
  Eigen::Vector3d axis(rng.normal(0.0, 1.0), rng.normal(0.0, 1.0),
                       rng.normal(0.0, 1.0));
  if (axis.norm() > 1e-12) {
    axis.normalize();
    const double angle =
        rng.normal(0.0, params.sigma_rot_deg * M_PI / 180.0);
    noisy.orientation =
        (Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis)) *
         noisy.orientation)
            .normalized();
  }
  if (noisy.orientation.w() < 0.0) {
    noisy.orientation.coeffs() *= -1.0;
  }
  return noisy;
}

}  // namespace cellkit::sim
