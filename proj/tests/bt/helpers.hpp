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

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "cellkit/bt/tree.hpp"

namespace cellkit::bt::testutil {

// Leaf that returns a fixed status every tick and counts invocations.
// Shared counters let tests inspect tick/halt activity per leaf index.
struct ScriptLog {
  std::vector<int> ticks;
  std::vector<int> halts;
};

class ScriptedBehavior : public Behavior {
 public:
  ScriptedBehavior(Status s, ScriptLog* log, int index)
      : status_(s), log_(log), index_(index) {}

  Status tick(TickContext&, const ParamMap&) override {
    if (log_) ++log_->ticks[index_];
    return status_;
  }

  void halt(TickContext&) override {
    if (log_) ++log_->halts[index_];
  }

 private:
  Status status_;
  ScriptLog* log_;
  int index_;
};

// Leaf whose per-tick results are scripted in advance; repeats the last
// entry once exhausted.
class SequencedBehavior : public Behavior {
 public:
  explicit SequencedBehavior(std::vector<Status> script)
      : script_(std::move(script)) {}

  Status tick(TickContext&, const ParamMap&) override {
    const Status s = script_[std::min(pos_, script_.size() - 1)];
    ++pos_;
    return s;
  }

 private:
  std::vector<Status> script_;
  size_t pos_ = 0;
};

// Builds a registry with behaviors "s0", "s1", ... returning the given
// fixed statuses, logging into `log`.
inline Registry scripted_registry(const std::vector<Status>& statuses,
                                  ScriptLog* log) {
  if (log) {
    log->ticks.assign(statuses.size(), 0);
    log->halts.assign(statuses.size(), 0);
  }
  Registry reg;
  for (size_t i = 0; i < statuses.size(); ++i) {
    const Status s = statuses[i];
    reg.add("s" + std::to_string(i), [s, log, i]() {
      return std::make_unique<ScriptedBehavior>(s, log, static_cast<int>(i));
    });
  }
  return reg;
}

// XML for one control node over n scripted action leaves s0..s(n-1).
inline std::string control_xml(const std::string& element, size_t n,
                               const std::string& attrs = "") {
  std::string xml = "<BehaviorTree><" + element + attrs + ">";
  for (size_t i = 0; i < n; ++i) {
    xml += "<Action name=\"s" + std::to_string(i) + "\"/>";
  }
  xml += "</" + element + "></BehaviorTree>";
  return xml;
}

}  // namespace cellkit::bt::testutil
