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

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>

#include "cellkit/bus/endpoint.hpp"
#include "cellkit/common/clock.hpp"
#include "cellkit/common/rng.hpp"
#include "cellkit/sim/wire.hpp"

namespace cellkit::sim {

namespace {

using bus::BusEndpoint;
using bus::Json;

// How long the arm pretends its driver is still booting when race_mode is
// on: it connects and heartbeats right away but advertises its services only
// after this much sim time, reproducing the start-order bug.
constexpr double kRaceBringupDelayS = 2.5;

// Sim-time service budgets for intra-cell calls.
constexpr int64_t kPeerTimeoutMs = 250;

// Wraps a service handler so malformed bodies produce an error reply
// instead of a silent timeout.
std::function<Json(const Json&)> guarded(std::function<Json(const Json&)> h) {
  return [h = std::move(h)](const Json& body) -> Json {
    try {
      return h(body);
    } catch (const std::exception& e) {
      return Json{{"ok", false}, {"error", e.what()}};
    }
  };
}

// Common scaffolding for one cell component: shared-epoch sim clock, bus
// endpoint with heartbeats, fault schedule, and the fixed-period main loop.
class Shell {
 public:
  explicit Shell(const ComponentContext& ctx)
      : ctx_(ctx),
        clock_(ctx.epoch_wall_us > 0 ? ctx.epoch_wall_us : wall_monotonic_us(),
               ctx.cfg.time_scale),
        faults_(component_faults(ctx),
                derive_seed(ctx.cfg.seed, "faults/" + ctx.name)) {}

  bool connect() {
    try {
      ep_ = BusEndpoint::connect(ctx_.port, ctx_.name, &clock_);
    } catch (const std::exception&) {
      return false;
    }
    ep_->start_heartbeats(ctx_.cfg.bus.heartbeat_period_ms);
    return true;
  }

  BusEndpoint& ep() { return *ep_; }
  SimClock& clock() { return clock_; }
  double now_s() { return static_cast<double>(clock_.now_us()) / 1e6; }

  void log(const std::string& line, const char* level = "info") {
    ep_->publish("log/" + ctx_.name, Json{{"line", line}, {"level", level}});
  }

  void announce_ready() { log("ready"); }

  // Runs `tick` every period_us of sim time until stopped, crashed, or cut
  // off from the broker. Crash, stall, and deaf faults are applied here;
  // anything else goes to `on_fault`.
  int loop(int64_t period_us, const std::function<void()>& tick,
           const std::function<void(const FaultEvent&)>& on_fault = nullptr) {
    int64_t next_us = clock_.now_us();
    while (true) {
      if (ctx_.stop && ctx_.stop->load()) return kExitClean;
      if (!ep_->connected()) return kExitBrokerLost;

      for (const FaultEvent& e : faults_.poll(now_s())) {
        switch (e.mode) {
          case FaultMode::kCrash:
            // a crash is silent: the broker disconnect is the only trace
            if (ctx_.hard_exit) _exit(kExitCrashFault);
            return kExitCrashFault;
          case FaultMode::kStall:
            stalled_ = true;
            ep_->set_stalled(true);
            break;
          case FaultMode::kDeaf:
            ep_->set_deaf(true);
            break;
          default:
            if (on_fault) on_fault(e);
            break;
        }
      }

      if (!stalled_) tick();

      next_us += period_us;
      // after a long hiccup, drop the backlog instead of bursting
      if (clock_.now_us() - next_us > 50 * period_us) {
        next_us = clock_.now_us();
      }
      clock_.sleep_until_us(next_us);
    }
  }

 private:
  std::vector<FaultSpec> component_faults(const ComponentContext& ctx) {
    const ComponentConfig* cc = find_component(ctx.cfg, ctx.name);
    return cc ? cc->faults : std::vector<FaultSpec>{};
  }

  const ComponentContext& ctx_;
  SimClock clock_;
  FaultSchedule faults_;
  std::unique_ptr<BusEndpoint> ep_;
  bool stalled_ = false;
};

// ---------------------------------------------------------------------------
// world: owns the physics. Everything else reads and writes it over the bus.

Json world_state_json(const World& w, const ScenarioConfig& cfg) {
  const ContactState& c = w.contact();
  Json objects = Json::object();
  for (const auto& [name, pose] : w.object_poses()) {
    objects[name] = pose_to_json(pose);
  }
  return Json{
      {"ok", true},
      {"time_s", w.time()},
      {"tool_pose", pose_to_json(w.tool_pose())},
      {"commanded_pose", pose_to_json(w.commanded_pose())},
      {"joints", joints_to_json(w.joints())},
      {"closure", w.closure()},
      {"closure_target", w.closure_target()},
      {"gripper_moving", w.gripper_moving()},
      {"attached_object", w.attached_object()},
      {"motion_active", w.motion_active()},
      {"jammed", w.jammed()},
      {"contact",
       Json{{"phase", contact_phase_name(c.phase)},
            {"penetration", c.penetration},
            {"depth", c.depth},
            {"lateral_offset", c.lateral_offset}}},
      {"wrench", wrench_to_json(w.contact_wrench())},
      {"objects", objects},
      {"surface_z", cfg.world.surface_z},
      {"hole",
       Json{{"center", Json::array({cfg.world.hole.center.x(),
                                    cfg.world.hole.center.y()})},
            {"radius", cfg.world.hole.radius},
            {"clearance", cfg.world.hole.clearance},
            {"depth", cfg.world.hole.depth},
            {"detection_radius", cfg.world.contact.detection_radius}}}};
}

Json world_apply_command(World& w, const Json& body) {
  const std::string op = body.value("op", "");
  auto result = [](bool ok, const std::string& reason = "") {
    return Json{{"ok", ok}, {"reason", reason}};
  };
  if (op == "trajectory") {
    const JointVector to = joints_from_json(body.at("to"));
    const double dur = body.at("duration_s").get<double>();
    if (!std::isfinite(dur) || dur <= 0.0) return result(false, "bad duration");
    return w.begin_trajectory(to, dur) ? result(true)
                                       : result(false, "jammed");
  }
  if (op == "servo") {
    const Eigen::Vector3d v = vec3_from_json(body.at("v"));
    const double dur = body.value("duration_s", 0.1);
    if (!std::isfinite(dur) || dur <= 0.0) return result(false, "bad duration");
    return w.begin_servo(v, dur) ? result(true) : result(false, "jammed");
  }
  if (op == "gripper") {
    const double closure = body.at("closure").get<double>();
    if (!std::isfinite(closure) || closure < 0.0 || closure > 1.0) {
      return result(false, "closure out of range");
    }
    w.command_gripper(closure);
    return result(true);
  }
  if (op == "halt") {
    w.halt();
    return result(true);
  }
  if (op == "reset") {
    w.reset();
    return result(true);
  }
  return result(false, "unknown op: " + op);
}

int run_world(const ComponentContext& ctx) {
  Shell sh(ctx);
  if (!sh.connect()) return kExitStartupFail;

  World world(ctx.cfg.world);
  std::mutex mu;
  bool was_jammed = false;

  sh.ep().advertise("svc/world.state", guarded([&](const Json&) {
                      std::lock_guard lk(mu);
                      return world_state_json(world, ctx.cfg);
                    }));
  sh.ep().advertise("svc/world.command", guarded([&](const Json& body) {
                      std::lock_guard lk(mu);
                      return world_apply_command(world, body);
                    }));
  sh.announce_ready();

  const auto step_us = static_cast<int64_t>(ctx.cfg.world_dt_s * 1e6);
  return sh.loop(step_us, [&] {
    std::lock_guard lk(mu);
    world.step(ctx.cfg.world_dt_s);
    if (world.jammed() && !was_jammed) {
      sh.log("contact jammed: lateral_offset=" +
                 std::to_string(world.contact().lateral_offset),
             "error");
    }
    was_jammed = world.jammed();
  });
}

// ---------------------------------------------------------------------------
// arm: owns the planner and the goal state machine behind svc/arm.plan_move.

struct ArmGoal {
  Json target;  // as the client sent it, used for idempotent re-polls
  enum class St { kPlanning, kMoving, kReached, kFailed } st = St::kPlanning;
  bool pose_goal = false;
  Pose6D pose;
  JointVector to;
  std::string reason;
  double error = -1.0;  // max joint distance to goal, when known
};

const char* arm_state_name(ArmGoal::St st) {
  switch (st) {
    case ArmGoal::St::kPlanning: return "planning";
    case ArmGoal::St::kMoving: return "moving";
    case ArmGoal::St::kReached: return "reached";
    case ArmGoal::St::kFailed: return "failed";
  }
  return "?";
}

int run_arm(const ComponentContext& ctx) {
  Shell sh(ctx);
  if (!sh.connect()) return kExitStartupFail;
  const ScenarioConfig& cfg = ctx.cfg;

  std::mutex mu;
  std::optional<ArmGoal> goal;
  JointVector joints_cache = cfg.world.home;
  bool cache_fresh = false;
  bool cache_jammed = false;
  bool cache_moving = false;
  PlanOptions popts = cfg.plan;
  Rng plan_rng(derive_seed(cfg.seed, "planner"));
  const std::vector<std::string> expected = {"joint_trajectory", "compliance"};
  std::vector<std::string> active = expected;

  auto status_json = [&](const ArmGoal& g) {
    Json out{{"ok", true},
             {"state", arm_state_name(g.st)},
             {"joints", joints_to_json(joints_cache)}};
    if (!g.reason.empty()) out["reason"] = g.reason;
    if (g.error >= 0.0) out["error"] = g.error;
    return out;
  };

  auto advertise_services = [&] {
    sh.ep().advertise(
        "svc/arm.plan_move", guarded([&](const Json& body) {
          const Json& target = body.at("target");
          std::lock_guard lk(mu);
          if (goal && goal->target == target) {
            Json out = status_json(*goal);
            if (goal->st == ArmGoal::St::kReached ||
                goal->st == ArmGoal::St::kFailed) {
              goal.reset();  // consumed; an identical re-request plans anew
            }
            return out;
          }
          ArmGoal g;
          g.target = target;
          if (target.is_string()) {
            const auto it = cfg.keyframes.find(target.get<std::string>());
            if (it == cfg.keyframes.end()) {
              return Json{{"ok", true},
                          {"state", "failed"},
                          {"reason", "unknown keyframe: " +
                                         target.get<std::string>()}};
            }
            g.to = it->second;
          } else if (target.is_array()) {
            g.to = joints_from_json(target);
          } else {
            g.pose_goal = true;
            g.pose = pose_from_json(target);
          }
          // a goal the arm already satisfies is acknowledged without
          // spinning up the planner, so zero-length moves settle in one
          // round trip
          bool satisfied = false;
          if (cache_fresh && !cache_moving && !cache_jammed) {
            if (g.pose_goal) {
              const Pose6D cur = fk_pose(cfg.world.dh, joints_cache);
              satisfied = cur.translation_distance(g.pose) < 1e-3 &&
                          cur.rotation_distance(g.pose) < 1e-2;
            } else {
              satisfied =
                  (joints_cache.q - g.to.q).cwiseAbs().maxCoeff() < 1e-4;
            }
          }
          if (satisfied) {
            return Json{{"ok", true},
                        {"state", "reached"},
                        {"joints", joints_to_json(joints_cache)},
                        {"error", 0.0}};
          }
          goal = std::move(g);
          return status_json(*goal);
        }));
    sh.ep().advertise("svc/arm.describe", guarded([&](const Json&) {
                        Json kf = Json::object();
                        for (const auto& [name, q] : cfg.keyframes) {
                          kf[name] = joints_to_json(q);
                        }
                        Json vmax = Json::array();
                        for (int i = 0; i < kNumJoints; ++i) {
                          vmax.push_back(cfg.plan.vmax[i]);
                        }
                        return Json{{"ok", true},
                                    {"home", joints_to_json(cfg.world.home)},
                                    {"vmax", vmax},
                                    {"keyframes", kf},
                                    {"controllers_expected", expected}};
                      }));
    sh.ep().advertise("svc/arm.controllers", guarded([&](const Json&) {
                        std::lock_guard lk(mu);
                        return Json{{"ok", true}, {"active", active}};
                      }));
    sh.ep().advertise(
        "svc/arm.restart_controller", guarded([&](const Json& body) {
          const std::string name = body.at("name").get<std::string>();
          std::lock_guard lk(mu);
          if (std::find(expected.begin(), expected.end(), name) ==
              expected.end()) {
            return Json{{"ok", false}, {"error", "unknown controller"}};
          }
          if (std::find(active.begin(), active.end(), name) == active.end()) {
            active.push_back(name);
          }
          return Json{{"ok", true}, {"active", active}};
        }));
  };

  // The race-condition bug: with race_mode the arm looks alive (connected,
  // heartbeating, "ready" in the log) long before its services exist.
  bool advertised = false;
  const double advertise_at_s = cfg.race_mode ? sh.now_s() + kRaceBringupDelayS
                                              : 0.0;
  if (!cfg.race_mode) {
    advertise_services();
    advertised = true;
  }
  sh.announce_ready();

  return sh.loop(
      10'000,
      [&] {
        if (!advertised && sh.now_s() >= advertise_at_s) {
          advertise_services();
          advertised = true;
        }

        // refresh the world view used by the goal state machine
        const auto r =
            sh.ep().request("svc/world.state", Json::object(), kPeerTimeoutMs);
        {
          std::lock_guard lk(mu);
          cache_fresh = !r.timed_out && r.body.value("ok", false);
          if (cache_fresh) {
            joints_cache = joints_from_json(r.body.at("joints"));
            cache_jammed = r.body.value("jammed", false);
            cache_moving = r.body.value("motion_active", false);
          }
        }

        // one goal transition per cycle, never holding the lock across a
        // bus call
        std::optional<Json> dispatch;
        {
          std::lock_guard lk(mu);
          if (!goal || !cache_fresh) return;
          if (goal->st == ArmGoal::St::kPlanning) {
            PlanResult plan =
                goal->pose_goal
                    ? plan_to_pose(cfg.world.dh, joints_cache, goal->pose,
                                   popts, plan_rng)
                    : plan_move(joints_cache, goal->to, popts, plan_rng);
            if (!plan.ok) {
              goal->st = ArmGoal::St::kFailed;
              goal->reason = plan.reason;
              sh.log("planning failed: " + plan.reason, "error");
              return;
            }
            goal->to = plan.traj.to;
            dispatch = Json{{"op", "trajectory"},
                            {"to", joints_to_json(plan.traj.to)},
                            {"duration_s", plan.traj.duration_s}};
          } else if (goal->st == ArmGoal::St::kMoving) {
            goal->error = (joints_cache.q - goal->to.q).cwiseAbs().maxCoeff();
            if (cache_jammed) {
              goal->st = ArmGoal::St::kFailed;
              goal->reason = "jammed";
            } else if (!cache_moving) {
              if (goal->error < 1e-4) {
                goal->st = ArmGoal::St::kReached;
              } else {
                goal->st = ArmGoal::St::kFailed;
                goal->reason = "halted short of target";
              }
            }
          }
        }
        if (dispatch) {
          const auto d = sh.ep().request("svc/world.command",
                                         std::move(*dispatch), kPeerTimeoutMs);
          std::lock_guard lk(mu);
          if (!goal || goal->st != ArmGoal::St::kPlanning) return;
          if (d.timed_out) {
            goal->st = ArmGoal::St::kFailed;
            goal->reason = "world unreachable";
          } else if (!d.body.value("ok", false)) {
            goal->st = ArmGoal::St::kFailed;
            goal->reason = d.body.value("reason", "rejected");
          } else {
            goal->st = ArmGoal::St::kMoving;
          }
        }
      },
      [&](const FaultEvent& e) {
        std::lock_guard lk(mu);
        if (e.mode == FaultMode::kPlannerFail) {
          popts.fail_probability = std::clamp(e.value, 0.0, 1.0);
        } else if (e.mode == FaultMode::kControllerMissing) {
          const std::string victim = e.detail.empty() ? "compliance" : e.detail;
          active.erase(std::remove(active.begin(), active.end(), victim),
                       active.end());
        }
      });
}

// ---------------------------------------------------------------------------
// gripper: thin poll-based façade over the world's gripper channel.

int run_gripper(const ComponentContext& ctx) {
  Shell sh(ctx);
  if (!sh.connect()) return kExitStartupFail;

  std::mutex mu;
  std::optional<double> pending;   // command not yet accepted by the world
  double target = 0.0;
  double closure_cache = 0.0;
  bool moving_cache = false;
  std::string attached_cache;

  sh.ep().advertise(
      "svc/gripper", guarded([&](const Json& body) {
        const double t = body.at("closure").get<double>();
        if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
          return Json{{"ok", false}, {"error", "closure out of range"}};
        }
        std::lock_guard lk(mu);
        if (t != target) {
          target = t;
          pending = t;
        }
        const bool done =
            !pending && !moving_cache && std::abs(closure_cache - target) < 1e-9;
        return Json{{"ok", true},
                    {"state", done ? "done" : "moving"},
                    {"closure", closure_cache},
                    {"attached", attached_cache}};
      }));
  sh.announce_ready();

  return sh.loop(10'000, [&] {
    std::optional<double> to_send;
    {
      std::lock_guard lk(mu);
      to_send = pending;
    }
    if (to_send) {
      const auto r = sh.ep().request(
          "svc/world.command",
          Json{{"op", "gripper"}, {"closure", *to_send}}, kPeerTimeoutMs);
      if (!r.timed_out && r.body.value("ok", false)) {
        std::lock_guard lk(mu);
        if (pending && *pending == *to_send) pending.reset();
      }
    }
    const auto r =
        sh.ep().request("svc/world.state", Json::object(), kPeerTimeoutMs);
    if (!r.timed_out && r.body.value("ok", false)) {
      std::lock_guard lk(mu);
      closure_cache = r.body.value("closure", 0.0);
      moving_cache = r.body.value("gripper_moving", false);
      attached_cache = r.body.value("attached_object", "");
    }
  });
}

// ---------------------------------------------------------------------------
// ft: samples the contact wrench with configurable noise.

int run_ft(const ComponentContext& ctx) {
  Shell sh(ctx);
  if (!sh.connect()) return kExitStartupFail;

  std::mutex mu;
  Wrench truth;
  bool have_truth = false;
  FtParams params = ctx.cfg.ft;
  Rng rng(derive_seed(ctx.cfg.seed, "ft"));

  sh.ep().advertise("svc/ft.read", guarded([&](const Json&) {
                      std::lock_guard lk(mu);
                      if (!have_truth) {
                        return Json{{"ok", false}, {"error", "no sample yet"}};
                      }
                      const Wrench s = sample_wrench(truth, params, rng);
                      return Json{{"ok", true},
                                  {"wrench", wrench_to_json(s)},
                                  {"sigma_force", params.sigma_force}};
                    }));
  sh.announce_ready();

  return sh.loop(
      5'000,
      [&] {
        const auto r =
            sh.ep().request("svc/world.state", Json::object(), kPeerTimeoutMs);
        if (!r.timed_out && r.body.value("ok", false)) {
          std::lock_guard lk(mu);
          truth = wrench_from_json(r.body.at("wrench"));
          have_truth = true;
        }
      },
      [&](const FaultEvent& e) {
        if (e.mode == FaultMode::kFtNoise) {
          std::lock_guard lk(mu);
          params.sigma_force = e.value;
        }
      });
}

// ---------------------------------------------------------------------------
// camera: wrist-mounted detector with field-of-view and miss probability.

int run_camera(const ComponentContext& ctx) {
  Shell sh(ctx);
  if (!sh.connect()) return kExitStartupFail;

  std::mutex mu;
  Pose6D tool_cache;
  std::map<std::string, Pose6D> objects_cache;
  bool have_view = false;
  Rng rng(derive_seed(ctx.cfg.seed, "camera"));

  sh.ep().advertise(
      "svc/camera.detect", guarded([&](const Json& body) {
        const std::string name = body.at("object").get<std::string>();
        std::lock_guard lk(mu);
        Json detections = Json::array();
        if (have_view) {
          const auto it = objects_cache.find(name);
          if (it != objects_cache.end()) {
            const auto det =
                sample_detection(tool_cache, it->second, ctx.cfg.camera, rng);
            if (det) detections.push_back(pose_to_json(*det));
          }
        }
        return Json{{"ok", true}, {"detections", detections}};
      }));
  sh.announce_ready();

  return sh.loop(20'000, [&] {
    const auto r =
        sh.ep().request("svc/world.state", Json::object(), kPeerTimeoutMs);
    if (r.timed_out || !r.body.value("ok", false)) return;
    std::lock_guard lk(mu);
    tool_cache = pose_from_json(r.body.at("tool_pose"));
    objects_cache.clear();
    for (const auto& [name, pose] : r.body.at("objects").items()) {
      objects_cache[name] = pose_from_json(pose);
    }
    have_view = true;
  });
}

// ---------------------------------------------------------------------------
// grasp_db: static lookup of grasp poses per object.

int run_grasp_db(const ComponentContext& ctx) {
  Shell sh(ctx);
  if (!sh.connect()) return kExitStartupFail;

  sh.ep().advertise(
      "svc/grasp_db.lookup", guarded([&](const Json& body) {
        const std::string name = body.at("object").get<std::string>();
        const auto it = ctx.cfg.grasps.find(name);
        if (it == ctx.cfg.grasps.end()) {
          return Json{{"ok", true}, {"found", false}};
        }
        return Json{{"ok", true},
                    {"found", true},
                    {"grasp",
                     Json{{"pose_in_object",
                           pose_to_json(it->second.grasp_pose_in_object)},
                          {"closure", it->second.closure}}}};
      }));
  sh.announce_ready();

  return sh.loop(50'000, [] {});
}

// ---------------------------------------------------------------------------
// force_servo: forwards Cartesian velocity commands, but only comes up if
// the arm description service answers at startup.

int run_force_servo(const ComponentContext& ctx) {
  Shell sh(ctx);
  if (!sh.connect()) return kExitStartupFail;

  const auto describe =
      sh.ep().request("svc/arm.describe", Json::object(), 2000);
  if (describe.timed_out || !describe.body.value("ok", false)) {
    sh.log("arm description unavailable, cannot start", "fatal");
    if (ctx.hard_exit) _exit(kExitStartupFail);
    return kExitStartupFail;
  }

  std::mutex mu;
  std::optional<Json> latest;  // newest not-yet-forwarded command

  sh.ep().advertise(
      "svc/arm.servo", guarded([&](const Json& body) {
        Json cmd;
        if (body.value("op", "") == "halt") {
          cmd = Json{{"op", "halt"}};
        } else {
          const Eigen::Vector3d v = vec3_from_json(body.at("v"));
          const double dur = body.value("duration_s", 0.1);
          if (!std::isfinite(dur) || dur <= 0.0 || v.norm() > 0.5) {
            return Json{{"ok", false}, {"error", "command out of range"}};
          }
          cmd = Json{{"op", "servo"},
                     {"v", vec3_to_json(v)},
                     {"duration_s", dur}};
        }
        std::lock_guard lk(mu);
        latest = std::move(cmd);
        return Json{{"ok", true}, {"accepted", true}};
      }));
  sh.announce_ready();

  return sh.loop(5'000, [&] {
    std::optional<Json> cmd;
    {
      std::lock_guard lk(mu);
      cmd.swap(latest);
    }
    if (cmd) {
      sh.ep().request("svc/world.command", std::move(*cmd), kPeerTimeoutMs);
    }
  });
}

}  // namespace

const std::vector<std::string>& component_kinds() {
  static const std::vector<std::string> kinds = {
      "world", "arm", "gripper", "ft", "camera", "grasp_db", "force_servo"};
  return kinds;
}

int run_component(const std::string& kind, const ComponentContext& ctx) {
  if (kind == "world") return run_world(ctx);
  if (kind == "arm") return run_arm(ctx);
  if (kind == "gripper") return run_gripper(ctx);
  if (kind == "ft") return run_ft(ctx);
  if (kind == "camera") return run_camera(ctx);
  if (kind == "grasp_db") return run_grasp_db(ctx);
  if (kind == "force_servo") return run_force_servo(ctx);
  throw std::invalid_argument("unknown component kind: " + kind);
}

}  // namespace cellkit::sim
