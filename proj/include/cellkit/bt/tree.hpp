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
#include <memory>
#include <string>
#include <vector>

#include "cellkit/bt/behavior.hpp"
#include "cellkit/bt/blackboard.hpp"
#include "cellkit/bt/model.hpp"
#include "cellkit/bt/status.hpp"
#include "cellkit/bt/trace.hpp"

namespace cellkit::bt {

// Pure status math for the control nodes, separate from traversal so it
// can be checked exhaustively against the documented rules.
//
//   Sequence / ReactiveSequence: FAILURE as soon as a child fails, SUCCESS
//     when all succeed, RUNNING at the first running child.
//   Fallback: SUCCESS as soon as a child succeeds, FAILURE when all fail,
//     RUNNING at the first running child.
//   Parallel(k): SUCCESS when at least k children have succeeded, FAILURE
//     once success is unattainable (children_count − failures < k),
//     RUNNING otherwise.
//
// k is ignored for non-Parallel kinds.
Status evaluate_control(NodeKind kind, const std::vector<Status>& child_statuses,
                        int k = 0);

struct RunResult {
  Status final_status = Status::IDLE;
  uint64_t tick_count = 0;
  std::vector<TraceEvent> trace;
  uint64_t missed_deadlines = 0;
};

class TreeNode;

// Instantiated, tickable tree bound to a Blackboard and a behavior set.
class ExecutableTree {
 public:
  ExecutableTree();
  ExecutableTree(ExecutableTree&&) noexcept;
  ExecutableTree& operator=(ExecutableTree&&) noexcept;
  ~ExecutableTree();

  // Builds all nodes, resolving Action/Condition names against the
  // registry. Throws std::runtime_error listing every unresolved name, or
  // whatever a behavior's init() throws for bad parameters. No behavior
  // side effects happen here.
  static ExecutableTree instantiate(const TreeDefinition& def,
                                    const Registry& registry,
                                    std::shared_ptr<Blackboard> bb);

  // One root-to-leaf traversal. Never throws for behavior faults: a
  // throwing leaf is logged and reported as FAILURE at that leaf.
  Status tick();

  // Halts any RUNNING subtree and resets every node to IDLE.
  void halt();

  Status root_status() const;
  uint64_t ticks_issued() const { return tick_index_; }

  // Ticks at frequency_hz until the root finishes or stop() holds. Ticks
  // that overrun their slot are counted, not fatal.
  RunResult run(double frequency_hz,
                const std::function<bool()>& stop = nullptr);

  // Defaults: real-time clock, no log sink, no trace sink.
  void set_clock(Clock* clock);
  void set_log_sink(std::function<void(const std::string&)> sink);
  void set_trace_sink(std::function<void(const TraceEvent&)> sink);

  Blackboard& blackboard() { return *bb_; }
  const Blackboard& blackboard() const { return *bb_; }
  const std::shared_ptr<Blackboard>& blackboard_ptr() const { return bb_; }
  const TreeDefinition& definition() const { return def_; }

  // Paths of all nodes in depth-first order, for trace tooling.
  std::vector<std::string> node_paths() const;

 private:
  TickContext make_context();

  TreeDefinition def_;
  std::shared_ptr<Blackboard> bb_;
  std::unique_ptr<TreeNode> root_;
  std::unique_ptr<Clock> owned_clock_;
  Clock* clock_ = nullptr;
  std::function<void(const std::string&)> log_sink_;
  std::function<void(const TraceEvent&)> trace_sink_;
  uint64_t tick_index_ = 0;
};

}  // namespace cellkit::bt
