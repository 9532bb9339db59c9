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

#include "cellkit/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellkit::sim {

const char* contact_phase_name(ContactPhase phase) {
  switch (phase) {
    case ContactPhase::kFree: return "free";
    case ContactPhase::kSurface: return "surface";
    case ContactPhase::kInHole: return "in_hole";
    case ContactPhase::kSeated: return "seated";
    case ContactPhase::kJammed: return "jammed";
  }
  return "?";
}

World::World(WorldParams params) : params_(std::move(params)) {
  q_ = params_.home;
  tool_cmd_ = fk(params_.dh, q_);
  grasp_offset_ = Eigen::Isometry3d::Identity();
  for (const ObjectSpec& spec : params_.objects) {
    objects_[spec.name] = spec.pose;
  }
  resolve_contact();
}

bool World::begin_trajectory(const JointVector& to, double duration_s) {
  if (jammed_) {
    return false;
  }
  traj_from_ = q_;
  traj_to_ = to;
  traj_t0_ = t_;
  traj_duration_ = std::max(duration_s, 1e-9);
  mode_ = Mode::kTrajectory;
  return true;
}

bool World::begin_servo(const Eigen::Vector3d& velocity_world,
                        double duration_s) {
  if (jammed_) {
    return false;
  }
  servo_v_ = velocity_world;
  servo_t_end_ = t_ + std::max(duration_s, 0.0);
  mode_ = Mode::kServo;
  return true;
}

void World::halt() { mode_ = Mode::kIdle; }

void World::command_gripper(double closure) {
  closure_target_ = std::clamp(closure, 0.0, 1.0);
}

void World::reset() {
  q_ = params_.home;
  tool_cmd_ = fk(params_.dh, q_);
  lift_ = 0.0;
  mode_ = Mode::kIdle;
  closure_ = 0.0;
  closure_target_ = 0.0;
  attached_.clear();
  attached_is_peg_ = false;
  grasp_offset_ = Eigen::Isometry3d::Identity();
  objects_.clear();
  for (const ObjectSpec& spec : params_.objects) {
    objects_[spec.name] = spec.pose;
  }
  jammed_ = false;
  resolve_contact();
}

void World::step(double dt) {
  if (!(dt > 0.0) || dt > params_.max_step_s + 1e-12) {
    throw std::invalid_argument("world step size out of range");
  }
  t_ += dt;

  if (!jammed_) {
    if (mode_ == Mode::kTrajectory) {
      const double s = (t_ - traj_t0_) / traj_duration_;
      if (s >= 1.0) {
        q_ = traj_to_;
        mode_ = Mode::kIdle;
      } else {
        q_.q = traj_from_.q + s * (traj_to_.q - traj_from_.q);
      }
      tool_cmd_ = fk(params_.dh, q_);
    } else if (mode_ == Mode::kServo) {
      const Eigen::Vector3d next =
          tool_cmd_.translation() + servo_v_ * dt;
      const bool in_reach =
          next.norm() < workspace_radius(params_.dh) - 0.05 && next.z() > -0.2;
      if (in_reach) {
        tool_cmd_.translation() = next;
        IkOptions opts;
        opts.max_iters = 15;
        const IkResult track =
            ik(params_.dh, isometry_to_pose(tool_cmd_), q_, opts);
        if (track.ok) {
          q_ = track.q;
        }
      }
      if (t_ >= servo_t_end_) {
        mode_ = Mode::kIdle;
      }
    }
  }

  resolve_contact();

  const bool gripper_was_moving = closure_ != closure_target_;
  if (gripper_was_moving) {
    const double max_move = params_.gripper_rate * dt;
    const double delta = closure_target_ - closure_;
    if (std::abs(delta) <= max_move) {
      closure_ = closure_target_;
    } else {
      closure_ += std::copysign(max_move, delta);
    }
    if (closure_ == closure_target_) {
      const Eigen::Vector3d tool_p =
          tool_cmd_.translation() + Eigen::Vector3d(0.0, 0.0, lift_);
      if (closure_target_ >= 0.5 && attached_.empty()) {
        const std::string* best = nullptr;
        double best_d = params_.grasp_tolerance;
        for (const auto& [name, pose] : objects_) {
          const double d = (pose.position - tool_p).norm();
          if (d <= best_d) {
            best_d = d;
            best = &name;
          }
        }
        if (best != nullptr) {
          attached_ = *best;
          Eigen::Isometry3d tool_act = tool_cmd_;
          tool_act.translation().z() += lift_;
          grasp_offset_ =
              tool_act.inverse() * pose_to_isometry(objects_[attached_]);
          attached_is_peg_ = false;
          for (const ObjectSpec& spec : params_.objects) {
            if (spec.name == attached_) {
              attached_is_peg_ = spec.is_peg;
            }
          }
          resolve_contact();
        }
      } else if (closure_target_ < 0.5 && !attached_.empty()) {
        const std::string released = attached_;
        attached_.clear();
        attached_is_peg_ = false;
        settle_object(released);
        resolve_contact();
      }
    }
  }
}

Eigen::Vector3d World::contact_point(const Eigen::Isometry3d& tool) const {
  if (attached_is_peg_) {
    return (tool * grasp_offset_).translation();
  }
  return tool.translation();
}

double World::floor_z(double lateral_offset, bool shaft) const {
  const double surface = params_.surface_z;
  if (!shaft) {
    return surface;
  }
  const HoleSpec& hole = params_.hole;
  if (lateral_offset <= hole.clearance) {
    return surface - hole.depth;
  }
  if (lateral_offset <= params_.contact.detection_radius) {
    return surface - params_.contact.catch_depth;
  }
  return surface;
}

void World::resolve_contact() {
  const ContactParams& cp = params_.contact;
  const double surface = params_.surface_z;
  const bool shaft = attached_is_peg_;

  const Eigen::Vector3d tip_cmd = contact_point(tool_cmd_);
  const Eigen::Vector2d off_vec =
      tip_cmd.head<2>() - params_.hole.center;
  const double off = off_vec.norm();
  const double zf = floor_z(off, shaft);
  const double pen = std::max(0.0, zf - tip_cmd.z());
  lift_ = pen;
  const double tip_z = tip_cmd.z() + pen;
  const bool engaged = shaft && tip_z < surface - 1e-12;

  const double f_up = cp.k_normal * pen;
  Eigen::Vector2d f_lat = Eigen::Vector2d::Zero();
  if (engaged && off > 1e-12) {
    const double mag = cp.k_lateral * std::max(0.0, off - params_.hole.clearance);
    f_lat = -mag * off_vec / off;
  }

  if (engaged && !jammed_) {
    const Eigen::Vector3d axis = tool_cmd_.linear().col(2);
    const double cos_tilt =
        std::clamp(axis.dot(Eigen::Vector3d(0.0, 0.0, -1.0)), -1.0, 1.0);
    const double tilt_deg = std::acos(cos_tilt) * 180.0 / M_PI;
    const bool bind_tilt = tilt_deg > cp.jam_angle_deg;
    const bool bind_force =
        off > params_.hole.clearance && f_up > cp.jam_force;
    if (bind_tilt || bind_force) {
      jammed_ = true;
      mode_ = Mode::kIdle;
    }
  }

  contact_.penetration = pen;
  contact_.depth = std::max(0.0, surface - tip_z);
  contact_.lateral_offset = off;
  contact_.force = Eigen::Vector3d(f_lat.x(), f_lat.y(), f_up);

  const double mouth = params_.hole.radius - params_.hole.clearance +
                       cp.detection_radius;
  if (jammed_) {
    contact_.phase = ContactPhase::kJammed;
  } else if (engaged && off <= mouth) {
    if (contact_.depth >= params_.hole.depth - 1e-9 && f_up >= cp.seat_force) {
      contact_.phase = ContactPhase::kSeated;
    } else {
      contact_.phase = ContactPhase::kInHole;
    }
  } else if (pen > 0.0) {
    contact_.phase = ContactPhase::kSurface;
  } else {
    contact_.phase = ContactPhase::kFree;
  }

  if (!attached_.empty()) {
    Eigen::Isometry3d tool_act = tool_cmd_;
    tool_act.translation().z() += lift_;
    objects_[attached_] = isometry_to_pose(tool_act * grasp_offset_);
  }
}

void World::settle_object(const std::string& name) {
  auto it = objects_.find(name);
  if (it == objects_.end()) {
    return;
  }
  bool is_peg = false;
  for (const ObjectSpec& spec : params_.objects) {
    if (spec.name == name) {
      is_peg = spec.is_peg;
    }
  }
  const Eigen::Vector2d off_vec =
      it->second.position.head<2>() - params_.hole.center;
  it->second.position.z() = floor_z(off_vec.norm(), is_peg);
}

Pose6D World::tool_pose() const {
  Eigen::Isometry3d tool_act = tool_cmd_;
  tool_act.translation().z() += lift_;
  return isometry_to_pose(tool_act);
}

Pose6D World::commanded_pose() const { return isometry_to_pose(tool_cmd_); }

Wrench World::contact_wrench() const {
  Wrench w;
  w.force = contact_.force;
  return w;
}

bool World::gripper_moving() const { return closure_ != closure_target_; }

std::optional<Pose6D> World::object_pose(const std::string& name) const {
  auto it = objects_.find(name);
  if (it == objects_.end()) {
    return std::nullopt;
  }
  return it->second;
}

}  // namespace cellkit::sim
