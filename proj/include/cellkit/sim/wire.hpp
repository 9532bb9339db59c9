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

#include "cellkit/bus/message.hpp"
#include "cellkit/common/types.hpp"

namespace cellkit::sim {

// JSON shapes used on the cell's svc/* topics. Decoders throw
// std::runtime_error on missing keys, wrong arity, or non-finite numbers;
// service handlers turn that into an error reply, clients treat it as a
// malformed response.

bus::Json pose_to_json(const Pose6D& pose);
Pose6D pose_from_json(const bus::Json& j);

bus::Json joints_to_json(const JointVector& q);
JointVector joints_from_json(const bus::Json& j);

bus::Json wrench_to_json(const Wrench& w);
Wrench wrench_from_json(const bus::Json& j);

bus::Json vec3_to_json(const Eigen::Vector3d& v);
Eigen::Vector3d vec3_from_json(const bus::Json& j);

}  // namespace cellkit::sim
