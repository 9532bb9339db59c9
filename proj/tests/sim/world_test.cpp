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

#include <cmath>

#include <doctest.h>

#include "cellkit/sim/scenario.hpp"

using namespace cellkit;
using namespace cellkit::sim;

namespace {

constexpr double kDt = 0.005;

void run_steps(World& w, int n) {
  for (int i = 0; i < n; ++i) {
    w.step(kDt);
  }
}

// Drives the commanded tool position to `target` in a straight line and
// lands on it exactly (the velocity is derived from the remaining delta).
void servo_to(World& w, const Eigen::Vector3d& target, double speed) {
  const Eigen::Vector3d from = w.commanded_pose().position;
  const Eigen::Vector3d delta = target - from;
  const double dist = delta.norm();
  if (dist < 1e-12) {
    return;
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(dist / speed / kDt)));
  const double duration = steps * kDt;
  REQUIRE(w.begin_servo(delta / duration, duration));
  run_steps(w, steps);
}

void close_gripper(World& w, double closure) {
  w.command_gripper(closure);
  for (int i = 0; i < 400 && w.gripper_moving(); ++i) {
    w.step(kDt);
  }
  REQUIRE_FALSE(w.gripper_moving());
}

void attach_housing(World& w, const ScenarioConfig& cfg) {
  REQUIRE(w.begin_trajectory(cfg.keyframes.at("grasp_housing"), 0.4));
  run_steps(w, 100);
  REQUIRE_FALSE(w.motion_active());
  close_gripper(w, 0.8);
  REQUIRE(w.attached_object() == "housing");
}

}  // namespace

TEST_CASE("initial state is free, open, and at the home pose") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  CHECK(w.contact().phase == ContactPhase::kFree);
  CHECK_FALSE(w.jammed());
  CHECK(w.closure() == 0.0);
  CHECK(w.attached_object().empty());
  const Pose6D tool = w.tool_pose();
  CHECK(tool.position.x() == doctest::Approx(0.45).epsilon(1e-5));
  CHECK(tool.position.z() == doctest::Approx(0.30).epsilon(1e-5));
  REQUIRE(w.object_pose("housing").has_value());
  CHECK(w.object_pose("housing")->position.y() == doctest::Approx(-0.15));
}

TEST_CASE("step sizes outside (0, max] are rejected") {
  World w(default_scenario().world);
  CHECK_THROWS_AS(w.step(0.0), std::invalid_argument);
  CHECK_THROWS_AS(w.step(-0.001), std::invalid_argument);
  CHECK_THROWS_AS(w.step(0.0101), std::invalid_argument);
  CHECK_NOTHROW(w.step(0.01));
  CHECK_NOTHROW(w.step(0.001));
}

TEST_CASE("trajectories land on the target configuration") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  const JointVector goal = cfg.keyframes.at("grasp_housing");
  REQUIRE(w.begin_trajectory(goal, 0.4));
  CHECK(w.motion_active());
  run_steps(w, 100);
  CHECK_FALSE(w.motion_active());
  CHECK((w.joints().q - goal.q).cwiseAbs().maxCoeff() == 0.0);
  const Pose6D tool = w.tool_pose();
  CHECK(tool.position.x() == doctest::Approx(0.45).epsilon(1e-4));
  CHECK(tool.position.y() == doctest::Approx(-0.15).epsilon(1e-4));
  CHECK(tool.position.z() == doctest::Approx(0.06).epsilon(1e-4));
}

TEST_CASE("closing near the housing attaches it; opening releases it") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  attach_housing(w, cfg);
  CHECK(w.closure() == 0.8);

  // lift, then release in the air: the object settles back onto the surface
  servo_to(w, {0.45, -0.15, 0.16}, 0.05);
  REQUIRE(w.object_pose("housing")->position.z() > 0.1);
  close_gripper(w, 0.0);
  CHECK(w.attached_object().empty());
  const Pose6D housing = *w.object_pose("housing");
  CHECK(housing.position.z() == doctest::Approx(cfg.world.surface_z).epsilon(1e-9));
  CHECK(housing.position.x() == doctest::Approx(0.45).epsilon(1e-4));
}

TEST_CASE("closing far from every object attaches nothing") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  close_gripper(w, 1.0);  // tool is at home, 30 cm above the table
  CHECK(w.attached_object().empty());
  CHECK(w.closure() == 1.0);
}

TEST_CASE("gripper closure ramps at the configured rate") {
  World w(default_scenario().world);
  w.command_gripper(1.0);
  run_steps(w, 50);  // 0.25 s at 2.0/s
  CHECK(w.closure() == doctest::Approx(0.5));
  CHECK(w.gripper_moving());
  run_steps(w, 51);
  CHECK(w.closure() == 1.0);
  w.command_gripper(0.5);
  for (int i = 0; i < 400 && w.gripper_moving(); ++i) {
    w.step(kDt);
  }
  CHECK(w.closure() == 0.5);
}

TEST_CASE("attachment stays rigid through arbitrary motion") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  attach_housing(w, cfg);
  const Pose6D offset0 = w.tool_pose().inverse().compose(*w.object_pose("housing"));

  servo_to(w, {0.45, -0.15, 0.18}, 0.08);
  REQUIRE(w.begin_servo({0.04, 0.05, -0.01}, 2.0));
  for (int i = 0; i < 400; ++i) {
    w.step(kDt);
    const Pose6D offset =
        w.tool_pose().inverse().compose(*w.object_pose("housing"));
    CHECK(offset.translation_distance(offset0) < 1e-9);
    CHECK(offset.rotation_distance(offset0) < 1e-9);
  }
}

TEST_CASE("straight descent onto the surface compresses the spring") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  const double surface = cfg.world.surface_z;

  // bare tool, away from the hole: approach to 0.5 mm above the surface
  servo_to(w, {0.45, 0.0, surface + 0.0005}, 0.08);
  CHECK(w.contact().phase == ContactPhase::kFree);

  // 1 mm/s straight down for one second
  REQUIRE(w.begin_servo({0.0, 0.0, -0.001}, 1.0));
  double prev_z = w.tool_pose().position.z();
  for (int i = 0; i < 200; ++i) {
    w.step(kDt);
    const double z = w.tool_pose().position.z();
    CHECK(z <= prev_z + 1e-12);  // monotone descent, then rests on the floor
    prev_z = z;
    const ContactState& c = w.contact();
    CHECK(c.force.z() ==
          doctest::Approx(cfg.world.contact.k_normal * c.penetration)
              .epsilon(1e-12));
  }
  const ContactState& c = w.contact();
  CHECK(c.penetration == doctest::Approx(0.0005).epsilon(1e-9));
  CHECK(c.force.z() == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(c.phase == ContactPhase::kSurface);
  CHECK(w.tool_pose().position.z() == doctest::Approx(surface).epsilon(1e-9));
}

TEST_CASE("a centered peg inserts to the bottom and seats") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  attach_housing(w, cfg);
  const Eigen::Vector2d hole = cfg.world.hole.center;

  servo_to(w, {0.45, -0.15, 0.12}, 0.08);
  servo_to(w, {hole.x(), hole.y(), 0.065}, 0.08);  // peg tip 5 mm above
  CHECK(w.contact().phase == ContactPhase::kFree);

  bool saw_free_fall = false;
  REQUIRE(w.begin_servo({0.0, 0.0, -0.005}, 4.3));
  for (int i = 0; i < 860; ++i) {
    w.step(kDt);
    const ContactState& c = w.contact();
    CHECK_FALSE(w.jammed());
    CHECK(c.phase != ContactPhase::kSurface);
    if (c.phase == ContactPhase::kInHole && c.depth < cfg.world.hole.depth - 1e-6) {
      CHECK(c.force.z() == doctest::Approx(0.0));
      saw_free_fall = true;
    }
  }
  CHECK(saw_free_fall);
  const ContactState& c = w.contact();
  CHECK(c.phase == ContactPhase::kSeated);
  CHECK(c.depth == doctest::Approx(cfg.world.hole.depth).epsilon(1e-9));
  CHECK(c.force.z() >= cfg.world.contact.seat_force);
  CHECK(c.lateral_offset < cfg.world.hole.clearance);
}

TEST_CASE("drop-in collapses the normal force and pushes toward the axis") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  attach_housing(w, cfg);
  const Eigen::Vector2d hole = cfg.world.hole.center;
  const double off = 0.0012;  // inside the catch ring

  servo_to(w, {0.45, -0.15, 0.12}, 0.08);
  servo_to(w, {hole.x() + off, hole.y(), 0.061}, 0.08);  // tip 1 mm above
  REQUIRE(w.begin_servo({0.0, 0.0, -0.002}, 1.0));
  bool crossed = false;
  for (int i = 0; i < 200 && !crossed; ++i) {
    w.step(kDt);
    const ContactState& c = w.contact();
    if (c.depth > 0.0) {
      crossed = true;
      CHECK(c.phase == ContactPhase::kInHole);
      CHECK(c.force.z() == doctest::Approx(0.0));
      const double expected =
          cfg.world.contact.k_lateral * (off - cfg.world.hole.clearance);
      CHECK(c.force.x() == doctest::Approx(-expected).epsilon(1e-3));
      CHECK(std::abs(c.force.y()) < 1e-4);
    }
  }
  CHECK(crossed);
}

TEST_CASE("an off-axis straight push jams and the jam is absorbing") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  attach_housing(w, cfg);
  const Eigen::Vector2d hole = cfg.world.hole.center;

  servo_to(w, {0.45, -0.15, 0.12}, 0.08);
  servo_to(w, {hole.x() + 0.0004, hole.y(), 0.065}, 0.08);
  REQUIRE(w.begin_servo({0.0, 0.0, -0.002}, 5.5));
  bool saw_catch = false;
  for (int i = 0; i < 1100 && !w.jammed(); ++i) {
    w.step(kDt);
    if (w.contact().phase == ContactPhase::kInHole) {
      saw_catch = true;
      // the rim catches the tip well short of the bottom
      CHECK(w.contact().depth <= cfg.world.contact.catch_depth + 1e-9);
    }
  }
  CHECK(saw_catch);
  REQUIRE(w.jammed());
  CHECK(w.contact().phase == ContactPhase::kJammed);

  const Pose6D frozen = w.tool_pose();
  CHECK_FALSE(w.begin_trajectory(cfg.keyframes.at("home"), 0.5));
  CHECK_FALSE(w.begin_servo({0.0, 0.0, 0.01}, 1.0));
  run_steps(w, 100);
  CHECK(w.jammed());
  CHECK(w.tool_pose().translation_distance(frozen) == 0.0);
}

TEST_CASE("tilting past the jam angle binds even without force") {
  ScenarioConfig cfg = default_scenario();
  cfg.world.contact.jam_force = 1e9;  // isolate the tilt rule
  World w(cfg.world);
  attach_housing(w, cfg);
  const Eigen::Vector2d hole = cfg.world.hole.center;

  servo_to(w, {0.45, -0.15, 0.12}, 0.08);
  servo_to(w, {hole.x() + 0.001, hole.y(), 0.065}, 0.08);
  servo_to(w, {hole.x() + 0.001, hole.y(), 0.0584}, 0.02);  // tip in the catch
  REQUIRE(w.contact().phase == ContactPhase::kInHole);
  CHECK_FALSE(w.jammed());

  // rotate toward a 4 degree tilt, leaning the tip across the bore axis so
  // it stays inside the detection ring the whole way
  Pose6D tilted = w.commanded_pose();
  tilted.orientation =
      (tilted.orientation *
       Eigen::Quaterniond(Eigen::AngleAxisd(-4.0 * M_PI / 180.0,
                                            Eigen::Vector3d::UnitY())))
          .normalized();
  const IkResult sol = ik(cfg.world.dh, tilted, w.joints());
  REQUIRE(sol.ok);
  REQUIRE(w.begin_trajectory(sol.q, 0.5));
  run_steps(w, 120);
  CHECK(w.jammed());
}

TEST_CASE("reset clears jam, poses, and the gripper") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  attach_housing(w, cfg);
  servo_to(w, {0.45, -0.15, 0.12}, 0.08);
  servo_to(w, {cfg.world.hole.center.x() + 0.0004, cfg.world.hole.center.y(),
               0.065},
           0.08);
  REQUIRE(w.begin_servo({0.0, 0.0, -0.002}, 5.5));
  for (int i = 0; i < 1100 && !w.jammed(); ++i) {
    w.step(kDt);
  }
  REQUIRE(w.jammed());

  w.reset();
  CHECK_FALSE(w.jammed());
  CHECK(w.contact().phase == ContactPhase::kFree);
  CHECK(w.closure() == 0.0);
  CHECK(w.attached_object().empty());
  CHECK(w.object_pose("housing")->position.y() == doctest::Approx(-0.15));
  CHECK((w.joints().q - cfg.world.home.q).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w.begin_trajectory(cfg.keyframes.at("grasp_housing"), 0.4));
}

TEST_CASE("identical command streams give identical histories") {
  const ScenarioConfig cfg = default_scenario();
  World a(cfg.world), b(cfg.world);

  auto both = [&](auto&& fn) {
    fn(a);
    fn(b);
  };
  both([&](World& w) { REQUIRE(w.begin_trajectory(cfg.keyframes.at("grasp_housing"), 0.4)); });
  for (int i = 0; i < 100; ++i) {
    both([](World& w) { w.step(kDt); });
  }
  both([](World& w) { w.command_gripper(0.8); });
  for (int i = 0; i < 90; ++i) {
    both([](World& w) { w.step(kDt); });
  }
  both([](World& w) { REQUIRE(w.begin_servo({0.02, 0.03, 0.04}, 1.5)); });
  for (int i = 0; i < 300; ++i) {
    both([](World& w) { w.step(kDt); });
    CHECK((a.joints().q - b.joints().q).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.tool_pose().translation_distance(b.tool_pose()) == 0.0);
    CHECK((a.contact().force - b.contact().force).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.contact().phase == b.contact().phase);
  }
  CHECK(a.attached_object() == b.attached_object());
}

TEST_CASE("servo motion freezes at the workspace boundary") {
  const ScenarioConfig cfg = default_scenario();
  World w(cfg.world);
  REQUIRE(w.begin_servo({0.5, 0.0, 0.0}, 10.0));
  run_steps(w, 2000);
  const double r = w.commanded_pose().position.norm();
  CHECK(r <= workspace_radius(cfg.world.dh) - 0.05 + 1e-6);
  const Pose6D before = w.tool_pose();
  run_steps(w, 10);
  CHECK(w.tool_pose().translation_distance(before) == 0.0);
}
