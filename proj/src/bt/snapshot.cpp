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

#include "cellkit/bt/snapshot.hpp"

#include <stdexcept>

#include "cellkit/common/binio.hpp"

namespace cellkit::bt {

namespace {

constexpr char kMagic[4] = {'C', 'B', 'T', '1'};

void write_string(BinWriter& w, const std::string& s) {
  w.u32(static_cast<uint32_t>(s.size()));
  w.bytes(s);
}

std::string read_string(BinReader& r) {
  const uint32_t n = r.u32();
  return std::string(r.bytes(n));
}

void write_pose(BinWriter& w, const Pose6D& p) {
  w.f64(p.position.x());
  w.f64(p.position.y());
  w.f64(p.position.z());
  w.f64(p.orientation.w());
  w.f64(p.orientation.x());
  w.f64(p.orientation.y());
  w.f64(p.orientation.z());
}

Pose6D read_pose(BinReader& r) {
  Pose6D p;
  p.position.x() = r.f64();
  p.position.y() = r.f64();
  p.position.z() = r.f64();
  const double qw = r.f64();
  const double qx = r.f64();
  const double qy = r.f64();
  const double qz = r.f64();
  p.orientation = Eigen::Quaterniond(qw, qx, qy, qz);
  return p;
}

void write_value(BinWriter& w, const Value& v) {
  w.u8(static_cast<uint8_t>(v.index() + 1));
  switch (v.index()) {
    case 0:
      write_string(w, std::get<std::string>(v));
      break;
    case 1:
      w.i64(std::get<int64_t>(v));
      break;
    case 2:
      w.f64(std::get<double>(v));
      break;
    case 3:
      w.u8(std::get<bool>(v) ? 1 : 0);
      break;
    case 4:
      write_pose(w, std::get<Pose6D>(v));
      break;
    case 5: {
      const auto& jv = std::get<JointVector>(v);
      for (int i = 0; i < kNumJoints; ++i) w.f64(jv.q[i]);
      break;
    }
    case 6: {
      const auto& wr = std::get<Wrench>(v);
      for (int i = 0; i < 3; ++i) w.f64(wr.force[i]);
      for (int i = 0; i < 3; ++i) w.f64(wr.torque[i]);
      break;
    }
    case 7: {
      const auto& g = std::get<GraspRecord>(v);
      write_string(w, g.object_name);
      write_pose(w, g.grasp_pose_in_object);
      w.f64(g.closure);
      break;
    }
  }
}

Value read_value(BinReader& r) {
  const uint8_t tag = r.u8();
  switch (tag) {
    case 1:
      return read_string(r);
    case 2:
      return r.i64();
    case 3:
      return r.f64();
    case 4:
      return r.u8() != 0;
    case 5:
      return read_pose(r);
    case 6: {
      JointVector jv;
      for (int i = 0; i < kNumJoints; ++i) jv.q[i] = r.f64();
      return jv;
    }
    case 7: {
      Wrench wr;
      for (int i = 0; i < 3; ++i) wr.force[i] = r.f64();
      for (int i = 0; i < 3; ++i) wr.torque[i] = r.f64();
      return wr;
    }
    case 8: {
      GraspRecord g;
      g.object_name = read_string(r);
      g.grasp_pose_in_object = read_pose(r);
      g.closure = r.f64();
      return g;
    }
    default:
      throw std::runtime_error("snapshot has unknown type tag " +
                               std::to_string(tag));
  }
}

}  // namespace

std::string snapshot(const TreeDefinition& def, const Blackboard& bb) {
  BinWriter w;
  w.bytes(std::string_view(kMagic, 4));
  const auto entries = bb.sorted_entries();
  w.u32(static_cast<uint32_t>(entries.size()));
  for (const auto& [key, value] : entries) {
    write_string(w, key);
    write_value(w, value);
  }
  w.u64(bb.revision());
  write_string(w, def.xml_text);
  return w.take();
}

std::string snapshot(const ExecutableTree& tree) {
  return snapshot(tree.definition(), tree.blackboard());
}

ExecutableTree restore(std::string_view bytes, const Registry& registry) {
  BinReader r(bytes);
  if (bytes.size() < 4 || r.bytes(4) != std::string_view(kMagic, 4)) {
    throw std::runtime_error("snapshot magic mismatch");
  }
  const uint32_t count = r.u32();
  std::vector<std::pair<std::string, Value>> entries;
  entries.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    std::string key = read_string(r);
    entries.emplace_back(std::move(key), read_value(r));
  }
  const uint64_t revision = r.u64();
  const std::string xml = read_string(r);
  if (!r.done()) throw std::runtime_error("snapshot has trailing bytes");

  TreeDefinition def = parse_tree(xml);
  auto bb = std::make_shared<Blackboard>();
  bb->restore_raw(std::move(entries), revision);
  return ExecutableTree::instantiate(def, registry, std::move(bb));
}

}  // namespace cellkit::bt
