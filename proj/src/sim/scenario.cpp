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

#include "cellkit/sim/scenario.hpp"

#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

namespace cellkit::sim {
namespace {

JointVector make_joints(std::initializer_list<double> values) {
  JointVector j;
  int i = 0;
  for (double v : values) {
    j.q[i++] = v;
  }
  return j;
}

Eigen::Vector3d as_vec3(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() != 3) {
    throw std::runtime_error("expected a 3-element sequence");
  }
  return {node[0].as<double>(), node[1].as<double>(), node[2].as<double>()};
}

Eigen::Vector2d as_vec2(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() != 2) {
    throw std::runtime_error("expected a 2-element sequence");
  }
  return {node[0].as<double>(), node[1].as<double>()};
}

JointVector as_joints(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() != kNumJoints) {
    throw std::runtime_error("expected a 6-element joint vector");
  }
  JointVector j;
  for (int i = 0; i < kNumJoints; ++i) {
    j.q[i] = node[i].as<double>();
  }
  return j;
}

Eigen::Quaterniond as_quat(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() != 4) {
    throw std::runtime_error("expected a quaternion as [w, x, y, z]");
  }
  Eigen::Quaterniond q(node[0].as<double>(), node[1].as<double>(),
                       node[2].as<double>(), node[3].as<double>());
  return q.normalized();
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) {
    out = node[key].as<T>();
  }
}

FaultSpec parse_fault(const YAML::Node& node) {
  FaultSpec spec;
  const std::string mode = node["mode"].as<std::string>();
  const auto parsed = parse_fault_mode(mode);
  if (!parsed) {
    throw std::runtime_error("unknown fault mode: " + mode);
  }
  spec.mode = *parsed;
  if (node["at"]) {
    spec.at_s = node["at"].as<double>();
  }
  if (node["mean_period"]) {
    spec.mean_period_s = node["mean_period"].as<double>();
  }
  if (spec.at_s < 0.0 && spec.mean_period_s <= 0.0) {
    throw std::runtime_error("fault needs `at` or `mean_period`");
  }
  read(node, "value", spec.value);
  read(node, "detail", spec.detail);
  return spec;
}

ComponentConfig parse_component(const YAML::Node& node) {
  ComponentConfig cc;
  cc.name = node["name"].as<std::string>();
  if (node["depends_on"]) {
    for (const auto& dep : node["depends_on"]) {
      cc.depends_on.push_back(dep.as<std::string>());
    }
  }
  read(node, "start_delay_s", cc.start_delay_s);
  if (node["faults"]) {
    for (const auto& f : node["faults"]) {
      cc.faults.push_back(parse_fault(f));
    }
  }
  return cc;
}

}  // namespace

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.world.dh = default_dh_table();
  // Tool straight down at (0.45, 0, 0.30).
  cfg.world.home = make_joints(
      {0.269933, -0.734406, 2.199827, 0.105375, 1.570796, -1.300863});
  cfg.world.surface_z = 0.02;
  cfg.world.hole.center = {0.45, 0.10};
  cfg.world.objects = {
      {"housing", Pose6D{{0.45, -0.15, 0.02}, {1.0, 0.0, 0.0, 0.0}}, true},
  };

  cfg.plan.vmax << 1.5, 1.5, 1.5, 2.0, 2.0, 2.5;

  cfg.keyframes["home"] = cfg.world.home;
  cfg.keyframes["search_housing"] = make_joints(
      {-0.065989, -1.138186, 2.131008, 0.577974, 1.570796, -1.636785});
  cfg.keyframes["grasp_housing"] = make_joints(
      {-0.065989, -1.333470, 2.045907, 0.858359, 1.570796, -1.636785});
  cfg.keyframes["above_hole"] = make_joints(
      {0.482019, -1.160445, 2.172603, 0.558639, 1.570796, -1.088777});
  cfg.keyframes["hole_approach"] = make_joints(
      {0.482019, -1.399370, 2.057729, 0.912437, 1.570796, -1.088777});

  GraspRecord housing;
  housing.object_name = "housing";
  housing.grasp_pose_in_object.position = {0.0, 0.0, 0.04};
  housing.grasp_pose_in_object.orientation =
      Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);  // tool z points back down
  housing.closure = 0.8;
  cfg.grasps["housing"] = housing;

  cfg.components = {
      {"world", {}, 0.0, {}},
      {"arm", {"world"}, 0.0, {}},
      {"gripper", {"world"}, 0.0, {}},
      {"ft", {"world"}, 0.0, {}},
      {"camera", {"world"}, 0.0, {}},
      {"grasp_db", {}, 0.0, {}},
      {"force_servo", {"arm"}, 5.0, {}},
  };
  return cfg;
}

ScenarioConfig parse_scenario_text(const std::string& yaml_text) {
  ScenarioConfig cfg = default_scenario();
  const YAML::Node root = YAML::Load(yaml_text);
  if (!root.IsDefined() || root.IsNull()) {
    return cfg;
  }
  if (!root.IsMap()) {
    throw std::runtime_error("scenario document must be a mapping");
  }

  read(root, "seed", cfg.seed);
  read(root, "race_mode", cfg.race_mode);
  read(root, "time_scale", cfg.time_scale);
  if (cfg.time_scale <= 0.0) {
    throw std::runtime_error("time_scale must be positive");
  }

  if (const YAML::Node bus = root["bus"]) {
    read(bus, "port", cfg.bus.port);
    read(bus, "heartbeat_period_ms", cfg.bus.heartbeat_period_ms);
  }

  if (const YAML::Node world = root["world"]) {
    read(world, "dt", cfg.world_dt_s);
    read(world, "surface_z", cfg.world.surface_z);
    read(world, "grasp_tolerance", cfg.world.grasp_tolerance);
    read(world, "gripper_rate", cfg.world.gripper_rate);
    if (const YAML::Node hole = world["hole"]) {
      if (hole["center"]) {
        cfg.world.hole.center = as_vec2(hole["center"]);
      }
      read(hole, "radius", cfg.world.hole.radius);
      read(hole, "clearance", cfg.world.hole.clearance);
      read(hole, "depth", cfg.world.hole.depth);
    }
    if (const YAML::Node contact = world["contact"]) {
      read(contact, "k_normal", cfg.world.contact.k_normal);
      read(contact, "k_lateral", cfg.world.contact.k_lateral);
      read(contact, "catch_depth", cfg.world.contact.catch_depth);
      read(contact, "detection_radius", cfg.world.contact.detection_radius);
      read(contact, "jam_angle_deg", cfg.world.contact.jam_angle_deg);
      read(contact, "jam_force", cfg.world.contact.jam_force);
      read(contact, "seat_force", cfg.world.contact.seat_force);
      read(contact, "fingertip_radius", cfg.world.contact.fingertip_radius);
    }
    if (const YAML::Node objects = world["objects"]) {
      cfg.world.objects.clear();
      for (const auto& node : objects) {
        ObjectSpec spec;
        spec.name = node["name"].as<std::string>();
        spec.pose.position = as_vec3(node["position"]);
        if (node["orientation"]) {
          spec.pose.orientation = as_quat(node["orientation"]);
        }
        if (node["peg"]) {
          spec.is_peg = node["peg"].as<bool>();
        }
        cfg.world.objects.push_back(std::move(spec));
      }
    }
  }

  if (const YAML::Node arm = root["arm"]) {
    if (arm["home"]) {
      cfg.world.home = as_joints(arm["home"]);
      cfg.keyframes["home"] = cfg.world.home;
    }
    if (arm["vmax"]) {
      cfg.plan.vmax = as_joints(arm["vmax"]).q;
    }
    if (const YAML::Node kfs = arm["keyframes"]) {
      for (const auto& kv : kfs) {
        cfg.keyframes[kv.first.as<std::string>()] = as_joints(kv.second);
      }
    }
  }

  if (const YAML::Node planner = root["planner"]) {
    read(planner, "p_fail", cfg.plan.fail_probability);
    read(planner, "min_duration_s", cfg.plan.min_duration_s);
  }
  if (const YAML::Node ft = root["ft"]) {
    read(ft, "sigma_force", cfg.ft.sigma_force);
    read(ft, "sigma_torque", cfg.ft.sigma_torque);
  }
  if (const YAML::Node cam = root["camera"]) {
    read(cam, "half_angle_deg", cfg.camera.half_angle_deg);
    read(cam, "range", cfg.camera.range);
    read(cam, "p_detect", cfg.camera.p_detect);
    read(cam, "sigma_pos", cfg.camera.sigma_pos);
    read(cam, "sigma_rot_deg", cfg.camera.sigma_rot_deg);
  }

  if (const YAML::Node grasps = root["grasps"]) {
    for (const auto& kv : grasps) {
      GraspRecord rec;
      rec.object_name = kv.first.as<std::string>();
      const YAML::Node val = kv.second;
      if (val["offset"]) {
        rec.grasp_pose_in_object.position = as_vec3(val["offset"]);
      }
      if (val["orientation"]) {
        rec.grasp_pose_in_object.orientation = as_quat(val["orientation"]);
      }
      read(val, "closure", rec.closure);
      cfg.grasps[rec.object_name] = std::move(rec);
    }
  }

  if (const YAML::Node components = root["components"]) {
    cfg.components.clear();
    for (const auto& node : components) {
      cfg.components.push_back(parse_component(node));
    }
  }

  if (const YAML::Node faults = root["faults"]) {
    for (const auto& node : faults) {
      const std::string target = node["component"].as<std::string>();
      bool found = false;
      for (ComponentConfig& cc : cfg.components) {
        if (cc.name == target) {
          cc.faults.push_back(parse_fault(node));
          found = true;
        }
      }
      if (!found) {
        throw std::runtime_error("fault targets unknown component: " + target);
      }
    }
  }

  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

std::vector<std::string> startup_order(
    const std::vector<ComponentConfig>& components) {
  std::set<std::string> known;
  for (const ComponentConfig& cc : components) {
    known.insert(cc.name);
  }
  for (const ComponentConfig& cc : components) {
    for (const std::string& dep : cc.depends_on) {
      if (known.count(dep) == 0) {
        throw std::runtime_error("component " + cc.name +
                                 " depends on unknown component " + dep);
      }
    }
  }

  std::vector<std::string> order;
  std::set<std::string> placed;
  while (order.size() < components.size()) {
    bool progressed = false;
    for (const ComponentConfig& cc : components) {
      if (placed.count(cc.name) != 0) {
        continue;
      }
      bool ready = true;
      for (const std::string& dep : cc.depends_on) {
        if (placed.count(dep) == 0) {
          ready = false;
          break;
        }
      }
      if (ready) {
        order.push_back(cc.name);
        placed.insert(cc.name);
        progressed = true;
      }
    }
    if (!progressed) {
      throw std::runtime_error("component dependency cycle");
    }
  }
  return order;
}

const ComponentConfig* find_component(const ScenarioConfig& cfg,
                                      const std::string& name) {
  for (const ComponentConfig& cc : cfg.components) {
    if (cc.name == name) {
      return &cc;
    }
  }
  return nullptr;
}

}  // namespace cellkit::sim
