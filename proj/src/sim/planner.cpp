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

#include "cellkit/sim/planner.hpp"

#include <algorithm>
#include <cmath>

namespace cellkit::sim {

JointVector Trajectory::sample(double t) const {
  double s = duration_s > 0.0 ? t / duration_s : 1.0;
  s = std::clamp(s, 0.0, 1.0);
  JointVector out;
  out.q = from.q + s * (to.q - from.q);
  return out;
}

PlanResult plan_move(const JointVector& from, const JointVector& to,
                     const PlanOptions& opts, Rng& rng) {
  PlanResult res;
  if (opts.fail_probability > 0.0 && rng.bernoulli(opts.fail_probability)) {
    res.reason = "planner fault";
    return res;
  }
  double duration = opts.min_duration_s;
  for (int i = 0; i < kNumJoints; ++i) {
    if (opts.vmax[i] <= 0.0) {
      res.reason = "nonpositive velocity limit";
      return res;
    }
    duration = std::max(duration, std::abs(to.q[i] - from.q[i]) / opts.vmax[i]);
  }
  res.ok = true;
  res.traj = Trajectory{from, to, duration};
  return res;
}

PlanResult plan_to_pose(const DhTable& dh, const JointVector& from,
                        const Pose6D& goal, const PlanOptions& opts, Rng& rng) {
  const IkResult sol = ik(dh, goal, from);
  if (!sol.ok) {
    PlanResult res;
    res.reason = "goal unreachable";
    return res;
  }
  return plan_move(from, sol.q, opts, rng);
}

}  // namespace cellkit::sim
