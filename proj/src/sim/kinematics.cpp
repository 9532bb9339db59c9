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

#include "cellkit/sim/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace cellkit::sim {
namespace {

constexpr double kHalfPi = 1.5707963267948966;

// Frames 0..6 of the chain; frame i is the pose after the first i rows.
std::array<Eigen::Isometry3d, kNumJoints + 1> frames(const DhTable& dh,
                                                     const JointVector& q) {
  std::array<Eigen::Isometry3d, kNumJoints + 1> out;
  out[0] = Eigen::Isometry3d::Identity();
  for (int i = 0; i < kNumJoints; ++i) {
    out[i + 1] = out[i] * dh_transform(dh[i], q.q[i]);
  }
  return out;
}

Eigen::Matrix<double, 6, 6> jacobian_from_frames(
    const std::array<Eigen::Isometry3d, kNumJoints + 1>& f) {
  const Eigen::Vector3d pe = f[kNumJoints].translation();
  Eigen::Matrix<double, 6, 6> J;
  for (int i = 0; i < kNumJoints; ++i) {
    const Eigen::Vector3d z = f[i].linear().col(2);
    const Eigen::Vector3d p = f[i].translation();
    J.block<3, 1>(0, i) = z.cross(pe - p);
    J.block<3, 1>(3, i) = z;
  }
  return J;
}

}  // namespace

DhTable default_dh_table() {
  return DhTable{{
      {0.00, kHalfPi, 0.30, 0.0},
      {0.40, 0.0, 0.00, 0.0},
      {0.35, 0.0, 0.00, 0.0},
      {0.00, kHalfPi, 0.12, 0.0},
      {0.00, -kHalfPi, 0.10, 0.0},
      {0.00, 0.0, 0.08, 0.0},
  }};
}

double workspace_radius(const DhTable& dh) {
  double r = 0.0;
  for (const DhRow& row : dh) {
    r += std::abs(row.a) + std::abs(row.d);
  }
  return r;
}

Eigen::Isometry3d dh_transform(const DhRow& row, double q) {
  const double theta = row.theta_offset + q;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.linear() << ct, -st * ca, st * sa,  //
      st, ct * ca, -ct * sa,            //
      0.0, sa, ca;
  T.translation() << row.a * ct, row.a * st, row.d;
  return T;
}

Eigen::Isometry3d fk(const DhTable& dh, const JointVector& q) {
  return frames(dh, q)[kNumJoints];
}

Pose6D fk_pose(const DhTable& dh, const JointVector& q) {
  return isometry_to_pose(fk(dh, q));
}

Eigen::Matrix<double, 6, 6> geometric_jacobian(const DhTable& dh,
                                               const JointVector& q) {
  return jacobian_from_frames(frames(dh, q));
}

Eigen::Matrix<double, 6, 1> pose_error(const Eigen::Isometry3d& goal,
                                       const Eigen::Isometry3d& current) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = goal.translation() - current.translation();
  const Eigen::Matrix3d R = goal.linear() * current.linear().transpose();
  const Eigen::AngleAxisd aa(R);
  e.tail<3>() = aa.angle() * aa.axis();
  return e;
}

IkResult ik(const DhTable& dh, const Pose6D& goal, const JointVector& seed,
            const IkOptions& opts) {
  IkResult res;
  res.q = seed;
  if (goal.position.norm() > workspace_radius(dh)) {
    return res;  // provably out of reach, do not iterate
  }

  // Rotation components are weighted down so a radian of orientation error
  // does not dominate a millimeter of position error in the step objective.
  Eigen::Matrix<double, 6, 1> w;
  w << 1.0, 1.0, 1.0, 0.3, 0.3, 0.3;
  const Eigen::Matrix<double, 6, 6> W = w.asDiagonal();

  const Eigen::Isometry3d T_goal = pose_to_isometry(goal);
  JointVector q = seed;
  auto f = frames(dh, q);
  Eigen::Matrix<double, 6, 1> e = pose_error(T_goal, f[kNumJoints]);
  double cost = (W * e).squaredNorm();
  double lambda = 1e-3;

  for (int it = 0; it < opts.max_iters; ++it) {
    res.pos_err = e.head<3>().norm();
    res.rot_err = e.tail<3>().norm();
    if (res.pos_err < opts.tol_pos && res.rot_err < opts.tol_rot) {
      res.ok = true;
      res.q = q;
      res.iters = it;
      return res;
    }
    const Eigen::Matrix<double, 6, 6> J = W * jacobian_from_frames(f);
    const Eigen::Matrix<double, 6, 6> H =
        J.transpose() * J + lambda * Eigen::Matrix<double, 6, 6>::Identity();
    Eigen::Matrix<double, 6, 1> dq = H.ldlt().solve(J.transpose() * (W * e));
    const double n = dq.norm();
    if (n > 1.0) {
      dq /= n;
    }
    JointVector qn;
    qn.q = q.q + dq;
    auto fn = frames(dh, qn);
    const Eigen::Matrix<double, 6, 1> en = pose_error(T_goal, fn[kNumJoints]);
    const double cn = (W * en).squaredNorm();
    if (cn < cost) {
      q = qn;
      f = fn;
      e = en;
      cost = cn;
      lambda = std::max(lambda * 0.4, 1e-9);
    } else {
      lambda = std::min(lambda * 4.0, 1e6);
    }
  }
  res.q = q;
  res.iters = opts.max_iters;
  res.pos_err = e.head<3>().norm();
  res.rot_err = e.tail<3>().norm();
  return res;
}

Pose6D isometry_to_pose(const Eigen::Isometry3d& T) {
  Pose6D p;
  p.position = T.translation();
  p.orientation = Eigen::Quaterniond(T.linear()).normalized();
  if (p.orientation.w() < 0.0) {
    p.orientation.coeffs() *= -1.0;
  }
  return p;
}

Eigen::Isometry3d pose_to_isometry(const Pose6D& pose) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.linear() = pose.orientation.normalized().toRotationMatrix();
  T.translation() = pose.position;
  return T;
}

}  // namespace cellkit::sim
