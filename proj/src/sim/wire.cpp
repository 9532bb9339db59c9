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

#include "cellkit/sim/wire.hpp"

#include <cmath>
#include <stdexcept>

namespace cellkit::sim {

namespace {

double finite_number(const bus::Json& j, const char* what) {
  if (!j.is_number()) {
    throw std::runtime_error(std::string(what) + ": expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw std::runtime_error(std::string(what) + ": non-finite value");
  }
  return v;
}

const bus::Json& field(const bus::Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::runtime_error(std::string(what) + ": missing key `" + key + "`");
  }
  return j.at(key);
}

void fill(const bus::Json& j, const char* what, double* out, size_t n) {
  if (!j.is_array() || j.size() != n) {
    throw std::runtime_error(std::string(what) + ": expected an array of " +
                             std::to_string(n));
  }
  for (size_t i = 0; i < n; ++i) {
    out[i] = finite_number(j[i], what);
  }
}

}  // namespace

bus::Json vec3_to_json(const Eigen::Vector3d& v) {
  return bus::Json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec3_from_json(const bus::Json& j) {
  double buf[3];
  fill(j, "vec3", buf, 3);
  return {buf[0], buf[1], buf[2]};
}

bus::Json pose_to_json(const Pose6D& pose) {
  return bus::Json{
      {"position", vec3_to_json(pose.position)},
      {"orientation",
       bus::Json::array({pose.orientation.w(), pose.orientation.x(),
                         pose.orientation.y(), pose.orientation.z()})}};
}

Pose6D pose_from_json(const bus::Json& j) {
  Pose6D pose;
  pose.position = vec3_from_json(field(j, "position", "pose"));
  double q[4];
  fill(field(j, "orientation", "pose"), "pose orientation", q, 4);
  pose.orientation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
  const double n = pose.orientation.norm();
  if (n < 1e-6) {
    throw std::runtime_error("pose orientation: zero quaternion");
  }
  pose.orientation.coeffs() /= n;
  return pose;
}

bus::Json joints_to_json(const JointVector& q) {
  bus::Json out = bus::Json::array();
  for (int i = 0; i < kNumJoints; ++i) {
    out.push_back(q.q[i]);
  }
  return out;
}

JointVector joints_from_json(const bus::Json& j) {
  double buf[kNumJoints];
  fill(j, "joints", buf, kNumJoints);
  JointVector q;
  for (int i = 0; i < kNumJoints; ++i) {
    q.q[i] = buf[i];
  }
  return q;
}

bus::Json wrench_to_json(const Wrench& w) {
  return bus::Json{{"force", vec3_to_json(w.force)},
                   {"torque", vec3_to_json(w.torque)}};
}

Wrench wrench_from_json(const bus::Json& j) {
  Wrench w;
  w.force = vec3_from_json(field(j, "force", "wrench"));
  w.torque = vec3_from_json(field(j, "torque", "wrench"));
  return w;
}

}  // namespace cellkit::sim
