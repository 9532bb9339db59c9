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

#include "cellkit/sim/components.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include <doctest.h>

#include "cellkit/bus/broker.hpp"
#include "cellkit/bus/endpoint.hpp"
#include "cellkit/common/stats.hpp"
#include "cellkit/sim/wire.hpp"
#include "support/cell_rig.hpp"

using namespace cellkit;
using namespace cellkit::sim;
using bus::BusEndpoint;
using bus::Json;
using bus::Message;

using namespace cellkit::testing;

TEST_CASE("a full cell boots and serves every surface") {
  ScenarioConfig cfg = fast_scenario();
  cfg.camera.p_detect = 1.0;
  cfg.camera.sigma_pos = 0.0;
  cfg.camera.sigma_rot_deg = 0.0;
  CellRig rig(cfg);
  rig.boot("world");
  rig.boot("arm");
  rig.boot("gripper");
  rig.boot("ft");
  rig.boot("camera");
  rig.boot("grasp_db");
  rig.boot("force_servo");

  const Json desc = rig.req("svc/arm.describe", Json::object());
  REQUIRE(desc.value("ok", false));
  CHECK(desc.at("keyframes").contains("grasp_housing"));
  CHECK(desc.at("home").size() == 6);
  CHECK(desc.at("controllers_expected").size() == 2);

  const Json ctrl = rig.req("svc/arm.controllers", Json::object());
  REQUIRE(ctrl.value("ok", false));
  CHECK(ctrl.at("active").size() == 2);

  Json g = rig.req("svc/grasp_db.lookup", Json{{"object", "housing"}});
  REQUIRE(g.value("ok", false));
  CHECK(g.value("found", false));
  CHECK(g.at("grasp").value("closure", 0.0) == 0.8);
  g = rig.req("svc/grasp_db.lookup", Json{{"object", "bolt"}});
  CHECK_FALSE(g.value("found", true));

  // free space: the sensed wrench is just noise
  Json ft;
  for (int i = 0; i < 200; ++i) {  // wait out the first truth refresh
    ft = rig.req("svc/ft.read", Json::object());
    if (ft.value("ok", false)) break;
    wall_sleep_ms(5);
  }
  REQUIRE(ft.value("ok", false));
  const Wrench w = wrench_from_json(ft.at("wrench"));
  CHECK(w.force.norm() < 1.0);

  // the housing sits in the wrist camera's cone from the home pose
  Json det;
  for (int i = 0; i < 200; ++i) {
    det = rig.req("svc/camera.detect", Json{{"object", "housing"}});
    if (det.value("ok", false) && !det.at("detections").empty()) break;
    wall_sleep_ms(5);
  }
  REQUIRE(det.value("ok", false));
  REQUIRE(det.at("detections").size() == 1);
  const Pose6D seen = pose_from_json(det.at("detections")[0]);
  CHECK(seen.position.x() == doctest::Approx(0.45).epsilon(1e-9));
  CHECK(seen.position.y() == doctest::Approx(-0.15).epsilon(1e-9));
  CHECK(rig.req("svc/camera.detect", Json{{"object", "bolt"}})
            .at("detections")
            .empty());

  const Json st = rig.req("svc/world.state", Json::object());
  REQUIRE(st.value("ok", false));
  CHECK(st.value("time_s", 0.0) > 0.0);
  CHECK(st.at("contact").value("phase", "") == "free");

  // a servo nudge through force_servo reaches the world
  const double z0 =
      pose_from_json(st.at("tool_pose")).position.z();
  const Json acc = rig.req(
      "svc/arm.servo",
      Json{{"v", Json::array({0.0, 0.0, 0.01})}, {"duration_s", 0.2}});
  REQUIRE(acc.value("ok", false));
  wall_sleep_ms(150);
  const Json st2 = rig.req("svc/world.state", Json::object());
  CHECK(pose_from_json(st2.at("tool_pose")).position.z() > z0 + 1e-4);
}

TEST_CASE("the arm plans, moves, and reports goal outcomes") {
  CellRig rig(fast_scenario());
  rig.boot("world");
  rig.boot("arm");

  Json r = rig.drive_move("grasp_housing");
  CHECK(r.value("state", "") == "reached");
  CHECK(r.value("error", 1.0) < 1e-4);

  // idempotent zero-move on an already-reached target
  r = rig.drive_move("grasp_housing");
  CHECK(r.value("state", "") == "reached");

  r = rig.req("svc/arm.plan_move", Json{{"target", "warp_drive"}});
  CHECK(r.value("state", "") == "failed");
  CHECK(r.value("reason", "").find("unknown keyframe") != std::string::npos);

  Pose6D goal;
  goal.position = {0.45, -0.05, 0.25};
  goal.orientation =
      Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()));
  r = rig.drive_move(pose_to_json(goal));
  CHECK(r.value("state", "") == "reached");
  const Json st = rig.req("svc/world.state", Json::object());
  const Pose6D tool = pose_from_json(st.at("tool_pose"));
  CHECK(tool.translation_distance(goal) < 1e-3);

  goal.position = {2.0, 2.0, 2.0};
  r = rig.drive_move(pose_to_json(goal));
  CHECK(r.value("state", "") == "failed");
  CHECK(r.value("reason", "") == "goal unreachable");
}

TEST_CASE("the gripper service grasps and releases the housing") {
  CellRig rig(fast_scenario());
  rig.boot("world");
  rig.boot("arm");
  rig.boot("gripper");

  REQUIRE(rig.drive_move("grasp_housing").value("state", "") == "reached");

  Json r = rig.drive_gripper(0.8);
  REQUIRE(r.value("state", "") == "done");
  CHECK(r.value("closure", 0.0) == doctest::Approx(0.8));
  CHECK(r.value("attached", "") == "housing");
  CHECK(rig.req("svc/world.state", Json::object())
            .value("attached_object", "") == "housing");

  r = rig.drive_gripper(0.0);
  REQUIRE(r.value("state", "") == "done");
  CHECK(rig.req("svc/world.state", Json::object())
            .value("attached_object", "x")
            .empty());
}

TEST_CASE("a planner_fail fault makes every plan fail") {
  ScenarioConfig cfg = fast_scenario();
  add_fault(cfg, "arm", fault_at(FaultMode::kPlannerFail, 0.0, 1.0));
  CellRig rig(cfg);
  rig.boot("world");
  rig.boot("arm");
  wall_sleep_ms(50);  // let the fault poll fire

  const Json r = rig.drive_move("grasp_housing");
  CHECK(r.value("state", "") == "failed");
  CHECK(r.value("reason", "") == "planner fault");
  CHECK(rig.saw_log("arm", "planning failed"));
}

TEST_CASE("a crash fault drops the component off the bus") {
  ScenarioConfig cfg = fast_scenario();
  add_fault(cfg, "arm", fault_at(FaultMode::kCrash, 0.5));
  CellRig rig(cfg);
  rig.boot("world");
  auto& arm = rig.boot("arm");

  CHECK(rig.wait_exit(arm) == kExitCrashFault);
  for (int i = 0; i < 400 && !rig.disconnected("arm"); ++i) wall_sleep_ms(5);
  CHECK(rig.disconnected("arm"));

  const int hb_at_death = rig.heartbeats("arm");
  wall_sleep_ms(300);
  CHECK(rig.heartbeats("arm") == hb_at_death);
}

TEST_CASE("a stall fault freezes heartbeats but keeps the socket open") {
  ScenarioConfig cfg = fast_scenario();
  add_fault(cfg, "gripper", fault_at(FaultMode::kStall, 0.3));
  CellRig rig(cfg);
  rig.boot("world");
  rig.boot("gripper");

  wall_sleep_ms(200);  // sim 1.0 s, well past the stall
  const int h0 = rig.heartbeats("gripper");
  const Json r = rig.req("svc/gripper", Json{{"closure", 0.5}}, 400);
  CHECK(r.value("timed_out", false));
  wall_sleep_ms(300);
  CHECK(rig.heartbeats("gripper") == h0);
  CHECK_FALSE(rig.disconnected("gripper"));
}

TEST_CASE("a deaf fault keeps heartbeats while requests vanish") {
  ScenarioConfig cfg = fast_scenario();
  add_fault(cfg, "ft", fault_at(FaultMode::kDeaf, 0.3));
  CellRig rig(cfg);
  rig.boot("world");
  rig.boot("ft");

  wall_sleep_ms(200);
  const Json r = rig.req("svc/ft.read", Json::object(), 400);
  CHECK(r.value("timed_out", false));
  const int h0 = rig.heartbeats("ft");
  wall_sleep_ms(300);
  CHECK(rig.heartbeats("ft") > h0);
  CHECK_FALSE(rig.disconnected("ft"));
}

TEST_CASE("an ft_noise fault raises the reported sigma") {
  ScenarioConfig cfg = fast_scenario();
  add_fault(cfg, "ft", fault_at(FaultMode::kFtNoise, 0.2, 2.0));
  CellRig rig(cfg);
  rig.boot("world");
  rig.boot("ft");
  wall_sleep_ms(150);  // sim 0.75 s

  std::vector<double> fz;
  Json last;
  for (int i = 0; i < 60; ++i) {
    last = rig.req("svc/ft.read", Json::object());
    if (last.value("ok", false)) {
      fz.push_back(wrench_from_json(last.at("wrench")).force.z());
    }
  }
  REQUIRE(last.value("ok", false));
  CHECK(last.value("sigma_force", 0.0) == 2.0);
  REQUIRE(fz.size() > 30);
  CHECK(sample_stddev(fz) > 0.8);  // base sigma is 0.1
}

TEST_CASE("controller_missing is visible in the audit and restartable") {
  ScenarioConfig cfg = fast_scenario();
  add_fault(cfg, "arm",
            fault_at(FaultMode::kControllerMissing, 0.2, 0.0, "compliance"));
  CellRig rig(cfg);
  rig.boot("world");
  rig.boot("arm");
  wall_sleep_ms(150);

  Json ctrl = rig.req("svc/arm.controllers", Json::object());
  REQUIRE(ctrl.value("ok", false));
  REQUIRE(ctrl.at("active").size() == 1);
  CHECK(ctrl.at("active")[0].get<std::string>() == "joint_trajectory");

  const Json rr = rig.req("svc/arm.restart_controller",
                          Json{{"name", "compliance"}});
  CHECK(rr.value("ok", false));
  ctrl = rig.req("svc/arm.controllers", Json::object());
  CHECK(ctrl.at("active").size() == 2);

  CHECK_FALSE(rig.req("svc/arm.restart_controller", Json{{"name", "warp"}})
                  .value("ok", true));
}

TEST_CASE("race mode crashes an undelayed force_servo and spares a delayed one") {
  ScenarioConfig cfg = default_scenario();
  cfg.time_scale = 10.0;
  cfg.race_mode = true;
  CellRig rig(cfg);
  rig.boot("world");
  rig.boot("arm");  // "ready", but services come up 2.5 sim s later

  // started immediately: the describe call times out and the component dies
  auto& doomed = rig.launch("force_servo", "force_servo");
  CHECK(rig.wait_exit(doomed) == kExitStartupFail);
  for (int i = 0; i < 200; ++i) {
    if (rig.saw_log("force_servo", "arm description unavailable")) break;
    wall_sleep_ms(5);
  }
  CHECK(rig.saw_log("force_servo", "arm description unavailable"));

  // started after the configured 5 sim-second delay: arm services are up
  wall_sleep_ms(550);  // 5.5 sim s since boot
  auto& retry = rig.launch("force_servo", "force_servo_retry");
  REQUIRE(rig.wait_ready("force_servo_retry"));
  const Json acc = rig.req("svc/arm.servo", Json{{"op", "halt"}});
  CHECK(acc.value("ok", false));
}
