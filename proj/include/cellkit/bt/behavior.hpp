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

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cellkit/bt/status.hpp"
#include "cellkit/bt/trace.hpp"
#include "cellkit/common/clock.hpp"

namespace cellkit::bt {

class Blackboard;

using ParamMap = std::map<std::string, std::string>;

// Everything a node sees during one tick. The engine owns it; behaviors
// must not retain pointers beyond the tick.
struct TickContext {
  Blackboard* blackboard = nullptr;
  Clock* clock = nullptr;
  std::function<void(const std::string&)> log;
  std::function<void(const TraceEvent&)> trace;
  uint64_t tick_index = 0;

  void info(const std::string& msg) const {
    if (log) log(msg);
  }
};

// A leaf implementation. One instance is created per leaf node, so state
// kept across ticks (in-flight requests, counters) is per-node.
//
// tick() must not block: long work returns RUNNING and completes
// out-of-band. halt() is called when a decorator or control node abandons
// the leaf while RUNNING.
class Behavior {
 public:
  virtual ~Behavior() = default;

  // Instantiation-time parameter validation. Throw to reject the tree.
  virtual void init(const ParamMap& params) { (void)params; }

  virtual Status tick(TickContext& ctx, const ParamMap& params) = 0;

  virtual void halt(TickContext& ctx) { (void)ctx; }
};

using BehaviorFactory = std::function<std::unique_ptr<Behavior>()>;

// Name → behavior factory map used at instantiation.
class Registry {
 public:
  void add(const std::string& name, BehaviorFactory factory);
  bool contains(const std::string& name) const;
  std::unique_ptr<Behavior> make(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, BehaviorFactory> factories_;
};

}  // namespace cellkit::bt
