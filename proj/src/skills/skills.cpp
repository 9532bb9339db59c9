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

#include "cellkit/skills/skills.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cellkit/bt/blackboard.hpp"
#include "cellkit/common/types.hpp"
#include "cellkit/sim/wire.hpp"

namespace cellkit::skills {
namespace {

using bt::Blackboard;
using bt::ParamMap;
using bt::Status;
using bt::TickContext;
using bus::Json;
using bus::ReplyResult;
using sim::joints_to_json;
using sim::pose_from_json;
using sim::pose_to_json;
using sim::vec3_to_json;
using sim::wrench_from_json;

// --- parameter parsing -----------------------------------------------------

std::string required_param(const ParamMap& params, const std::string& key,
                           const std::string& skill) {
  const auto it = params.find(key);
  if (it == params.end() || it->second.empty()) {
    throw std::invalid_argument(skill + ": missing parameter '" + key + "'");
  }
  return it->second;
}

double param_double(const ParamMap& params, const std::string& key,
                    double fallback, const std::string& skill) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(skill + ": parameter '" + key +
                                "' is not a number: " + it->second);
  }
}

std::optional<std::vector<double>> parse_numbers(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

// --- one-in-flight request plumbing ----------------------------------------

// Each skill instance owns at most one outstanding request. The reply lands
// on the endpoint's reader thread; the tick thread is the only consumer.
class AsyncCall {
 public:
  bool idle() const { return !req_; }
  void send(bus::BusEndpoint& ep, const std::string& topic, Json body) {
    req_ = ep.request_async(topic, std::move(body), kRequestTimeoutMs);
  }
  std::optional<ReplyResult> poll(bus::BusEndpoint& ep) {
    return ep.poll_async(req_);
  }
  void cancel(bus::BusEndpoint& ep) { ep.cancel_async(req_); }

 private:
  bus::BusEndpoint::AsyncRequest req_;
};

// Send without caring about the reply; used for best-effort halt commands.
void send_and_drop(bus::BusEndpoint& ep, const std::string& topic, Json body) {
  auto req = ep.request_async(topic, std::move(body), kRequestTimeoutMs);
  ep.cancel_async(req);
}

class BusSkill : public bt::Behavior {
 public:
  explicit BusSkill(std::shared_ptr<SkillHost> host) : host_(std::move(host)) {}

  void halt(TickContext& ctx) override {
    (void)ctx;
    call_.cancel(ep());
    reset_state();
  }

 protected:
  bus::BusEndpoint& ep() { return *host_->endpoint; }
  virtual void reset_state() {}

  std::shared_ptr<SkillHost> host_;
  AsyncCall call_;
};

// --- MoveJoint / MoveEE -----------------------------------------------------

// Both drive svc/arm.plan_move and differ only in how the target is formed.
// The arm answers every request with the goal's current state; a terminal
// answer both finishes this skill and clears the goal on the arm side.
class PlanMoveSkill : public BusSkill {
 public:
  using BusSkill::BusSkill;

  Status tick(TickContext& ctx, const ParamMap& params) override {
    Json target;
    if (!make_target(ctx, params, target)) return Status::FAILURE;
    if (call_.idle()) {
      call_.send(ep(), "svc/arm.plan_move", Json{{"target", target}});
    }
    const auto r = call_.poll(ep());
    if (!r || r->timed_out) return Status::RUNNING;
    try {
      const std::string state = r->body.value("state", "");
      if (state == "reached") return Status::SUCCESS;
      if (state == "failed") {
        ctx.info(name() + " failed: " + r->body.value("reason", "unspecified"));
        return Status::FAILURE;
      }
    } catch (const std::exception&) {
      // not a goal answer; ask again next tick
    }
    return Status::RUNNING;
  }

 protected:
  virtual std::string name() const = 0;
  // False: the target cannot be produced and the skill fails this tick.
  virtual bool make_target(TickContext& ctx, const ParamMap& params,
                           Json& out) = 0;
};

class MoveJointSkill : public PlanMoveSkill {
 public:
  using PlanMoveSkill::PlanMoveSkill;

  void init(const ParamMap& params) override {
    const std::string target = required_param(params, "target", "MoveJoint");
    const auto nums = parse_numbers(target);
    if (!nums) {
      keyframe_ = target;
      return;
    }
    if (nums->size() != kNumJoints) {
      throw std::invalid_argument("MoveJoint: expected " +
                                  std::to_string(kNumJoints) +
                                  " joint values, got " +
                                  std::to_string(nums->size()));
    }
    JointVector jv;
    for (int i = 0; i < kNumJoints; ++i) {
      if (std::abs((*nums)[i]) > 2.0 * M_PI) {
        throw std::invalid_argument("MoveJoint: joint " + std::to_string(i) +
                                    " outside [-2pi, 2pi]");
      }
      jv.q[i] = (*nums)[i];
    }
    joints_ = jv;
  }

 protected:
  std::string name() const override { return "MoveJoint"; }

  bool make_target(TickContext&, const ParamMap&, Json& out) override {
    out = joints_ ? joints_to_json(*joints_) : Json(keyframe_);
    return true;
  }

 private:
  std::string keyframe_;
  std::optional<JointVector> joints_;
};

class MoveEESkill : public PlanMoveSkill {
 public:
  using PlanMoveSkill::PlanMoveSkill;

  void init(const ParamMap& params) override {
    const bool has_literal = params.count("goal") > 0;
    const bool has_key = params.count("goal_key") > 0;
    if (has_literal == has_key) {
      throw std::invalid_argument(
          "MoveEE: exactly one of 'goal' and 'goal_key' is required");
    }
    if (has_key) {
      goal_key_ = params.at("goal_key");
      return;
    }
    const auto nums = parse_numbers(params.at("goal"));
    if (!nums || nums->size() != 7) {
      throw std::invalid_argument(
          "MoveEE: 'goal' must be 7 numbers: x y z qw qx qy qz");
    }
    Pose6D p;
    p.position = {(*nums)[0], (*nums)[1], (*nums)[2]};
    p.orientation =
        Eigen::Quaterniond((*nums)[3], (*nums)[4], (*nums)[5], (*nums)[6]);
    if (p.orientation.norm() < 1e-9) {
      throw std::invalid_argument("MoveEE: zero quaternion");
    }
    p.orientation.normalize();
    goal_ = p;
  }

 protected:
  std::string name() const override { return "MoveEE"; }

  bool make_target(TickContext& ctx, const ParamMap&, Json& out) override {
    if (goal_) {
      out = pose_to_json(*goal_);
      return true;
    }
    const auto pose = ctx.blackboard->get_as<Pose6D>(goal_key_);
    if (!pose) {
      ctx.info("MoveEE failed: no pose at blackboard key " + goal_key_);
      return false;
    }
    out = pose_to_json(*pose);
    return true;
  }

 private:
  std::string goal_key_;
  std::optional<Pose6D> goal_;
};

// --- Grasp -------------------------------------------------------------------

class GraspSkill : public BusSkill {
 public:
  using BusSkill::BusSkill;

  void init(const ParamMap& params) override {
    const std::string cmd = required_param(params, "command", "Grasp");
    if (cmd == "open") {
      closure_ = 0.0;
    } else if (cmd == "close") {
      closure_ = 1.0;
    } else {
      const auto nums = parse_numbers(cmd);
      if (!nums || nums->size() != 1 || (*nums)[0] < 0.0 || (*nums)[0] > 1.0) {
        throw std::invalid_argument(
            "Grasp: command must be open, close, or a fraction in [0, 1]");
      }
      closure_ = (*nums)[0];
    }
  }

  Status tick(TickContext& ctx, const ParamMap&) override {
    if (call_.idle()) {
      call_.send(ep(), "svc/gripper", Json{{"closure", closure_}});
    }
    const auto r = call_.poll(ep());
    if (!r || r->timed_out) return Status::RUNNING;
    try {
      if (r->body.contains("ok") && !r->body.at("ok").get<bool>()) {
        ctx.info("Grasp failed: " +
                 r->body.value("error", std::string("gripper fault")));
        return Status::FAILURE;
      }
      if (r->body.value("state", "") == "done") return Status::SUCCESS;
    } catch (const std::exception&) {
    }
    return Status::RUNNING;
  }

 private:
  double closure_ = 0.0;
};

// --- contact skill scaffolding -----------------------------------------------

// MoveUntilFF, SearchAlign and NJInsert all interleave two exchanges over
// one in-flight slot: a velocity command to svc/arm.servo and a force
// sample from svc/ft.read. Per Table I these actions never fail; an outer
// Timeout decorator owns giving up.
class ContactSkill : public BusSkill {
 public:
  using BusSkill::BusSkill;

  Status tick(TickContext& ctx, const ParamMap&) override {
    return exchange(ctx);
  }

  void halt(TickContext& ctx) override {
    BusSkill::halt(ctx);
    send_and_drop(ep(), "svc/arm.servo", Json{{"op", "halt"}});
  }

 protected:
  // One tick of the command/sense loop: consume the landed reply if there
  // is one, then start the next exchange. A full cycle (velocity command,
  // then force sample) spans two ticks when replies are prompt.
  Status exchange(TickContext& ctx) {
    if (!call_.idle()) {
      const auto r = call_.poll(ep());
      if (!r) return Status::RUNNING;
      if (stage_ == Stage::kServo) {
        stage_ = Stage::kSense;
      } else {
        stage_ = Stage::kServo;
        if (!r->timed_out) {
          try {
            if (r->body.value("ok", false)) {
              const Wrench w = wrench_from_json(r->body.at("wrench"));
              if (on_sample(ctx, w)) {
                send_and_drop(ep(), "svc/arm.servo", Json{{"op", "halt"}});
                reset_state();
                return Status::SUCCESS;
              }
            }
          } catch (const std::exception&) {
          }
        }
      }
    }
    if (stage_ == Stage::kServo) {
      // cycle_gate_us spaces out control cycles when the tick rate outruns
      // the skill's control period
      const int64_t now = ctx.clock->now_us();
      if (next_cycle_us_ >= 0 && now < next_cycle_us_) return Status::RUNNING;
      next_cycle_us_ = now + cycle_gate_us_;
      call_.send(ep(), "svc/arm.servo", servo_command(ctx));
    } else {
      call_.send(ep(), "svc/ft.read", Json::object());
    }
    return Status::RUNNING;
  }

  void reset_state() override {
    stage_ = Stage::kServo;
    next_cycle_us_ = -1;
  }

  void set_cycle_gate_us(int64_t gate_us) { cycle_gate_us_ = gate_us; }

  // Commanded velocity for the next stretch; called when a servo slot opens.
  virtual Json servo_command(TickContext& ctx) = 0;
  // True when the skill's success condition holds for this force sample.
  virtual bool on_sample(TickContext& ctx, const Wrench& w) = 0;

  // Sim seconds since the previous call, for integrating command state.
  double step_dt(TickContext& ctx) {
    const int64_t now = ctx.clock->now_us();
    const double dt =
        last_cmd_us_ < 0 ? 0.0 : static_cast<double>(now - last_cmd_us_) / 1e6;
    last_cmd_us_ = now;
    // a request timeout stretches the gap; cap it so state cannot jump
    return std::min(dt, 0.2);
  }

  void reset_step_timer() { last_cmd_us_ = -1; }

 private:
  enum class Stage { kServo, kSense };
  Stage stage_ = Stage::kServo;
  int64_t last_cmd_us_ = -1;
  int64_t cycle_gate_us_ = 0;
  int64_t next_cycle_us_ = -1;
};

// --- MoveUntilFF --------------------------------------------------------------

class MoveUntilFFSkill : public ContactSkill {
 public:
  using ContactSkill::ContactSkill;

  void init(const ParamMap& params) override {
    threshold_ = param_double(params, "threshold", 0.0, "MoveUntilFF");
    if (threshold_ <= 0.0) {
      throw std::invalid_argument("MoveUntilFF: 'threshold' must be positive");
    }
    if (threshold_ <= noise_floor(*host_)) {
      throw std::invalid_argument(
          "MoveUntilFF: threshold " + std::to_string(threshold_) +
          " N is within the sensor noise floor (" +
          std::to_string(noise_floor(*host_)) + " N)");
    }
    speed_ = param_double(params, "speed", kApproachSpeed, "MoveUntilFF");
    if (speed_ <= 0.0) {
      throw std::invalid_argument("MoveUntilFF: 'speed' must be positive");
    }
    axis_ = params.count("axis") ? params.at("axis") : "";
    if (axis_ != "" && axis_ != "x" && axis_ != "y" && axis_ != "z") {
      throw std::invalid_argument("MoveUntilFF: 'axis' must be x, y, or z");
    }
    // The arm approaches with the fingers pointing along tool +z; every
    // keyframe in the cell holds the tool vertical, so that axis is world
    // -z unless overridden.
    Eigen::Vector3d dir(0.0, 0.0, -1.0);
    if (params.count("direction")) {
      const auto nums = parse_numbers(params.at("direction"));
      if (!nums || nums->size() != 3) {
        throw std::invalid_argument("MoveUntilFF: 'direction' must be 3 numbers");
      }
      dir = Eigen::Vector3d((*nums)[0], (*nums)[1], (*nums)[2]);
      if (dir.norm() < 1e-9) {
        throw std::invalid_argument("MoveUntilFF: zero direction");
      }
    }
    direction_ = dir.normalized();
  }

 protected:
  Json servo_command(TickContext&) override {
    const Eigen::Vector3d v = direction_ * speed_;
    return Json{{"v", vec3_to_json(v)}, {"duration_s", 0.2}};
  }

  bool on_sample(TickContext&, const Wrench& w) override {
    double measured = w.force.norm();
    if (axis_ == "x") measured = std::abs(w.force.x());
    if (axis_ == "y") measured = std::abs(w.force.y());
    if (axis_ == "z") measured = std::abs(w.force.z());
    return measured > threshold_;
  }

 private:
  double threshold_ = 0.0;
  double speed_ = kApproachSpeed;
  std::string axis_;
  Eigen::Vector3d direction_{0.0, 0.0, -1.0};
};

// --- SearchAlign ---------------------------------------------------------------

// Slides the tool through an Archimedean spiral r = pitch * theta / 2pi in
// the contact plane while a small force regulator keeps it pressed against
// the surface. When the shaft drops into the hole the normal force
// collapses; two consecutive low samples count as detection.
class SearchAlignSkill : public ContactSkill {
 public:
  using ContactSkill::ContactSkill;

  void init(const ParamMap& params) override {
    pitch_ = param_double(params, "pitch", kSpiralPitch, "SearchAlign");
    max_radius_ =
        param_double(params, "max_radius", kSpiralMaxRadius, "SearchAlign");
    speed_ = param_double(params, "speed", kSpiralSpeed, "SearchAlign");
    force_ =
        param_double(params, "contact_force", kSpiralContactForce, "SearchAlign");
    if (pitch_ <= 0.0 || max_radius_ <= 0.0 || speed_ <= 0.0 || force_ <= 0.0) {
      throw std::invalid_argument(
          "SearchAlign: pitch, max_radius, speed and contact_force must be "
          "positive");
    }
  }

 protected:
  Json servo_command(TickContext& ctx) override {
    const double dt = step_dt(ctx);
    const double a = pitch_ / (2.0 * M_PI);
    double r = std::min(a * theta_, max_radius_);
    theta_ += speed_ * dt / std::max(std::hypot(r, a), 1e-6);
    r = std::min(a * theta_, max_radius_);

    // Unit tangent of the spiral; on the outer circle the radial part is 0.
    const double c = std::cos(theta_);
    const double s = std::sin(theta_);
    const double dr = (a * theta_ < max_radius_) ? a : 0.0;
    Eigen::Vector2d tangent(dr * c - r * s, dr * s + r * c);
    if (tangent.norm() < 1e-12) tangent = Eigen::Vector2d(1.0, 0.0);
    tangent.normalize();

    const double vz =
        std::clamp(kForceGain * (fz_ - force_), -kPressSpeed, kPressSpeed);
    const Eigen::Vector3d v(tangent.x() * speed_, tangent.y() * speed_, vz);
    return Json{{"v", vec3_to_json(v)}, {"duration_s", 0.2}};
  }

  bool on_sample(TickContext&, const Wrench& w) override {
    fz_ = w.force.z();
    // The hole has two force signatures: the press force collapses when the
    // tip drops off the plane, and a snag on the rim shows up as lateral
    // load that a flat surface never produces. The lateral gate sits well
    // above the sensor noise so a clean plane cannot trip it.
    const double lateral = w.force.head<2>().norm();
    const double lat_gate = std::max(5.0 * host_->sigma_force, 0.1 * force_);
    const bool hit = fz_ < 0.3 * force_ || lateral > lat_gate;
    low_count_ = hit ? low_count_ + 1 : 0;
    return low_count_ >= 2;
  }

  void reset_state() override {
    ContactSkill::reset_state();
    reset_step_timer();
    theta_ = 0.0;
    fz_ = 0.0;
    low_count_ = 0;
  }

 private:
  static constexpr double kForceGain = 0.002;  // m/s per newton of error
  static constexpr double kPressSpeed = 0.005;

  double pitch_ = kSpiralPitch;
  double max_radius_ = kSpiralMaxRadius;
  double speed_ = kSpiralSpeed;
  double force_ = kSpiralContactForce;

  double theta_ = 0.0;
  double fz_ = 0.0;
  int low_count_ = 0;
};

// --- NJInsert -------------------------------------------------------------------

// Descends into the hole pushing at a slight angle away from the side the
// lateral load comes from, re-aimed from each fresh block of force samples,
// so the shaft walks off the rim instead of wedging against it. The descent
// pauses whenever the axial load nears the seat threshold, which keeps the
// total contact force under the sim's jam limit while the lateral walk
// relieves the bind.
class NJInsertSkill : public ContactSkill {
 public:
  using ContactSkill::ContactSkill;

  void init(const ParamMap& params) override {
    seat_ = param_double(params, "seat_threshold", kInsertSeatForce, "NJInsert");
    tilt_deg_ = param_double(params, "tilt_deg", kInsertTiltDeg, "NJInsert");
    const double step = param_double(params, "step_ms", kInsertStepMs, "NJInsert");
    speed_ = param_double(params, "speed", kInsertSpeed, "NJInsert");
    min_depth_ = param_double(params, "min_depth", kInsertMinDepth, "NJInsert");
    if (seat_ <= 0.0) {
      throw std::invalid_argument("NJInsert: 'seat_threshold' must be positive");
    }
    if (tilt_deg_ <= 0.0 || tilt_deg_ >= 45.0) {
      throw std::invalid_argument("NJInsert: 'tilt_deg' must be in (0, 45)");
    }
    if (step <= 0.0 || step != std::floor(step)) {
      throw std::invalid_argument("NJInsert: 'step_ms' must be a positive integer");
    }
    if (speed_ <= 0.0 || min_depth_ <= 0.0) {
      throw std::invalid_argument("NJInsert: 'speed' and 'min_depth' must be positive");
    }
    set_cycle_gate_us(static_cast<int64_t>(step) * 1000);
  }

 protected:
  Json servo_command(TickContext& ctx) override {
    const double dt = step_dt(ctx);
    const double tilt = tilt_deg_ * M_PI / 180.0;
    const double vz = fz_ > seat_ + kCapMargin ? 0.0 : -std::cos(tilt) * speed_;
    descended_ += -vz * dt;
    const Eigen::Vector3d v(lat_dir_.x() * std::sin(tilt) * speed_,
                            lat_dir_.y() * std::sin(tilt) * speed_, vz);
    return Json{{"v", vec3_to_json(v)}, {"duration_s", 0.2}};
  }

  bool on_sample(TickContext& ctx, const Wrench& w) override {
    fz_ = w.force.z();
    block_.push_back(w.force.head<2>());
    if (block_.size() >= kBlockSize) {
      Eigen::Vector2d avg = Eigen::Vector2d::Zero();
      for (const auto& f : block_) avg += f;
      avg /= static_cast<double>(block_.size());
      block_.clear();
      if (avg.norm() > noise_floor(*host_)) {
        // the rim pushes the shaft toward relief; walk with it
        lat_dir_ = avg.normalized();
        append_direction(ctx, lat_dir_);
      } else {
        lat_dir_.setZero();
      }
    }
    return fz_ >= seat_ && descended_ >= min_depth_;
  }

  void reset_state() override {
    ContactSkill::reset_state();
    reset_step_timer();
    fz_ = 0.0;
    descended_ = 0.0;
    lat_dir_.setZero();
    block_.clear();
  }

 private:
  // Descent resumes below seat + margin; the sim jams a cocked shaft at
  // higher loads, so the ceiling stays well under that.
  static constexpr double kCapMargin = 2.0;
  static constexpr size_t kBlockSize = 5;

  // Direction history for diagnosis: "x,y;" per re-aim under the telemetry
  // key, so a run report can show how steady the walk was.
  void append_direction(TickContext& ctx, const Eigen::Vector2d& d) {
    std::ostringstream entry;
    entry << d.x() << "," << d.y() << ";";
    const auto prior =
        ctx.blackboard->get_as<std::string>("telemetry/nj_directions");
    ctx.blackboard->put("telemetry/nj_directions",
                        (prior ? *prior : std::string()) + entry.str());
  }

  double seat_ = kInsertSeatForce;
  double tilt_deg_ = kInsertTiltDeg;
  double speed_ = kInsertSpeed;
  double min_depth_ = kInsertMinDepth;

  double fz_ = 0.0;
  double descended_ = 0.0;
  Eigen::Vector2d lat_dir_{0.0, 0.0};
  std::vector<Eigen::Vector2d> block_;
};

// --- EstimatePose ----------------------------------------------------------------

class EstimatePoseSkill : public BusSkill {
 public:
  using BusSkill::BusSkill;

  void init(const ParamMap& params) override {
    object_ = required_param(params, "object", "EstimatePose");
    out_key_ = params.count("out_key") ? params.at("out_key") : "pose/" + object_;
  }

  Status tick(TickContext& ctx, const ParamMap&) override {
    if (call_.idle()) {
      call_.send(ep(), "svc/camera.detect", Json{{"object", object_}});
    }
    const auto r = call_.poll(ep());
    if (!r || r->timed_out) return Status::RUNNING;
    try {
      if (!r->body.value("ok", false)) return Status::RUNNING;
      const Json& dets = r->body.at("detections");
      if (!dets.is_array()) return Status::RUNNING;
      if (dets.empty()) {
        ctx.info("EstimatePose: no '" + object_ + "' in view");
        return Status::FAILURE;
      }
      const Pose6D pose = pose_from_json(dets.front());
      ctx.blackboard->put(out_key_, pose);
      return Status::SUCCESS;
    } catch (const std::exception&) {
      return Status::RUNNING;
    }
  }

 private:
  std::string object_;
  std::string out_key_;
};

// --- ComputeGrasp ----------------------------------------------------------------

class ComputeGraspSkill : public BusSkill {
 public:
  using BusSkill::BusSkill;

  void init(const ParamMap& params) override {
    object_ = required_param(params, "object", "ComputeGrasp");
    pose_key_ = params.count("pose_key") ? params.at("pose_key") : "pose/" + object_;
    out_key_ = params.count("out_key") ? params.at("out_key") : "grasp/" + object_;
  }

  Status tick(TickContext& ctx, const ParamMap&) override {
    const auto object_pose = ctx.blackboard->get_as<Pose6D>(pose_key_);
    if (!object_pose) {
      ctx.info("ComputeGrasp failed: no pose at blackboard key " + pose_key_);
      return Status::FAILURE;
    }
    if (call_.idle()) {
      call_.send(ep(), "svc/grasp_db.lookup", Json{{"object", object_}});
    }
    const auto r = call_.poll(ep());
    if (!r || r->timed_out) return Status::RUNNING;
    try {
      if (!r->body.value("ok", false)) return Status::RUNNING;
      if (!r->body.value("found", false)) {
        ctx.info("ComputeGrasp failed: '" + object_ + "' not in grasp database");
        return Status::FAILURE;
      }
      const Json& rec = r->body.at("grasp");
      const Pose6D in_object = pose_from_json(rec.at("pose_in_object"));
      const double closure = rec.at("closure").get<double>();
      ctx.blackboard->put(out_key_, object_pose->compose(in_object));
      ctx.blackboard->put("grasp_closure/" + object_, closure);
      return Status::SUCCESS;
    } catch (const std::exception&) {
      return Status::RUNNING;
    }
  }

 private:
  std::string object_;
  std::string pose_key_;
  std::string out_key_;
};

// --- CheckCondition ---------------------------------------------------------------

// Blackboard predicates; answers in exactly one tick.
class CheckConditionSkill : public bt::Behavior {
 public:
  void init(const ParamMap& params) override {
    predicate_ = required_param(params, "predicate", "CheckCondition");
    key_ = required_param(params, "key", "CheckCondition");
    if (predicate_ != "has_key" && predicate_ != "lacks_key" &&
        predicate_ != "flag") {
      throw std::invalid_argument("CheckCondition: unknown predicate '" +
                                  predicate_ + "'");
    }
  }

  Status tick(TickContext& ctx, const ParamMap&) override {
    bool truth = false;
    if (predicate_ == "has_key") truth = ctx.blackboard->has(key_);
    if (predicate_ == "lacks_key") truth = !ctx.blackboard->has(key_);
    if (predicate_ == "flag") truth = ctx.blackboard->flag(key_);
    return truth ? Status::SUCCESS : Status::FAILURE;
  }

 private:
  std::string predicate_;
  std::string key_;
};

}  // namespace

void register_skills(bt::Registry& registry, std::shared_ptr<SkillHost> host) {
  registry.add("MoveJoint",
               [host] { return std::make_unique<MoveJointSkill>(host); });
  registry.add("MoveEE", [host] { return std::make_unique<MoveEESkill>(host); });
  registry.add("Grasp", [host] { return std::make_unique<GraspSkill>(host); });
  registry.add("MoveUntilFF",
               [host] { return std::make_unique<MoveUntilFFSkill>(host); });
  registry.add("SearchAlign",
               [host] { return std::make_unique<SearchAlignSkill>(host); });
  registry.add("NJInsert",
               [host] { return std::make_unique<NJInsertSkill>(host); });
  registry.add("EstimatePose",
               [host] { return std::make_unique<EstimatePoseSkill>(host); });
  registry.add("ComputeGrasp",
               [host] { return std::make_unique<ComputeGraspSkill>(host); });
  registry.add("CheckCondition",
               [] { return std::make_unique<CheckConditionSkill>(); });
}

}  // namespace cellkit::skills
