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

#include <string>
#include <string_view>

#include "cellkit/bt/tree.hpp"

namespace cellkit::bt {

// Binary snapshot of an execution instance, taken between ticks.
//
// Layout (all integers little-endian):
//   magic "CBT1"
//   u32 entry_count
//   entry_count times, in ascending key order:
//     u32 key_len, key bytes, u8 type_tag, value bytes
//   u64 blackboard revision
//   u32 xml_len, tree XML bytes
//
// Type tags: 1 string, 2 integer, 3 real, 4 boolean, 5 Pose6D,
// 6 JointVector, 7 Wrench, 8 GraspRecord. Strings are u32-length-prefixed;
// vectors/poses are packed f64 sequences.
//
// The trailing revision and tree document let restore() return a ready
// ExecutableTree whose Blackboard matches the original entry-wise and
// revision-wise. No per-node execution state is stored: recovery re-ticks
// from the root and relies on condition-guarded tree design.
std::string snapshot(const TreeDefinition& def, const Blackboard& bb);
std::string snapshot(const ExecutableTree& tree);

// Rebuilds the tree (all nodes IDLE) and Blackboard. Throws
// std::runtime_error on any corruption; no partial state escapes.
ExecutableTree restore(std::string_view bytes, const Registry& registry);

}  // namespace cellkit::bt
