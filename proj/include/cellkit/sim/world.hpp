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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "cellkit/common/types.hpp"
#include "cellkit/sim/kinematics.hpp"

namespace cellkit::sim {

// Cylindrical bore in the work surface, axis along world z.
struct HoleSpec {
  Eigen::Vector2d center{0.45, 0.10};  // meters, world x/y
  double radius = 4e-3;
  double clearance = 5e-5;  // shaft radius = radius - clearance
  double depth = 15e-3;
};

struct ContactParams {
  double k_normal = 1e4;          // surface stiffness, N/m
  double k_lateral = 3e3;         // rim centering stiffness, N/m
  double catch_depth = 1.5e-3;    // partial drop when only the rim catches, m
  double detection_radius = 2e-3; // how far off-axis the mouth still catches
  double jam_angle_deg = 1.5;     // shaft tilt beyond this binds
  double jam_force = 15.0;        // axial force that binds an off-axis shaft, N
  double seat_force = 10.0;       // axial force classifying a full insert, N
  double fingertip_radius = 6e-3; // bare-gripper contact patch, m
};

enum class ContactPhase { kFree, kSurface, kInHole, kSeated, kJammed };
const char* contact_phase_name(ContactPhase phase);

struct ContactState {
  ContactPhase phase = ContactPhase::kFree;
  double penetration = 0.0;     // spring compression, m
  double depth = 0.0;           // tip depth below the surface, m
  double lateral_offset = 0.0;  // tip distance from the hole axis, m
  Eigen::Vector3d force{0.0, 0.0, 0.0};  // reaction on the tool, world frame
};

struct ObjectSpec {
  std::string name;
  Pose6D pose;          // object tip frame; sits on the surface at z = surface
  bool is_peg = false;  // pegs engage the hole when grasped
};

struct WorldParams {
  DhTable dh = default_dh_table();
  JointVector home;
  double surface_z = 0.02;
  HoleSpec hole;
  ContactParams contact;
  std::vector<ObjectSpec> objects;
  double grasp_tolerance = 0.05;  // max tool-to-object distance for attach
  double gripper_rate = 2.0;      // closure fraction per second
  double max_step_s = 0.01;
};

// Quasi-static model of the cell: one arm, one gripper, rigid objects, a
// work surface with a single bore. Positions are commanded; contact renders
// reaction forces from spring terms and clamps the tool above the local
// floor. Stepping is deterministic: all stochastic effects live in the
// sensor and component layers.
class World {
 public:
  explicit World(WorldParams params);

  // Commands. Trajectories and servo motions are refused while jammed.
  bool begin_trajectory(const JointVector& to, double duration_s);
  bool begin_servo(const Eigen::Vector3d& velocity_world, double duration_s);
  void halt();
  void command_gripper(double closure);
  void reset();

  // Advances sim time by dt seconds; dt must lie in (0, max_step_s].
  void step(double dt);

  double time() const { return t_; }
  const JointVector& joints() const { return q_; }
  Pose6D tool_pose() const;      // actual pose, clamped out of the floor
  Pose6D commanded_pose() const;
  const ContactState& contact() const { return contact_; }
  Wrench contact_wrench() const;
  double closure() const { return closure_; }
  double closure_target() const { return closure_target_; }
  bool gripper_moving() const;
  const std::string& attached_object() const { return attached_; }
  std::optional<Pose6D> object_pose(const std::string& name) const;
  const std::map<std::string, Pose6D>& object_poses() const { return objects_; }
  bool motion_active() const { return mode_ != Mode::kIdle; }
  bool jammed() const { return jammed_; }
  const WorldParams& params() const { return params_; }

 private:
  enum class Mode { kIdle, kTrajectory, kServo };

  // Contact point the floor acts on: the attached peg's tip, or the tool
  // itself when the gripper is empty.
  Eigen::Vector3d contact_point(const Eigen::Isometry3d& tool) const;
  double floor_z(double lateral_offset, bool shaft) const;
  void resolve_contact();
  void settle_object(const std::string& name);

  WorldParams params_;
  double t_ = 0.0;

  Mode mode_ = Mode::kIdle;
  JointVector q_;
  Eigen::Isometry3d tool_cmd_;  // commanded tool pose
  double lift_ = 0.0;           // clamp applied on top of the command, >= 0

  JointVector traj_from_, traj_to_;
  double traj_t0_ = 0.0, traj_duration_ = 0.0;
  Eigen::Vector3d servo_v_{0.0, 0.0, 0.0};
  double servo_t_end_ = 0.0;

  double closure_ = 0.0;
  double closure_target_ = 0.0;
  std::string attached_;
  Eigen::Isometry3d grasp_offset_;  // object pose in the tool frame

  std::map<std::string, Pose6D> objects_;
  bool attached_is_peg_ = false;
  ContactState contact_;
  bool jammed_ = false;
};

}  // namespace cellkit::sim
