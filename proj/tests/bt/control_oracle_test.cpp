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

#include <doctest.h>

#include <vector>

#include "cellkit/bt/tree.hpp"
#include "helpers.hpp"

using namespace cellkit::bt;
using namespace cellkit::bt::testutil;

namespace {

// Independent brute-force oracle, written straight from the documented
// control-node rules rather than from the engine:
//
//   Sequence ticks children left to right. It fails as soon as a child
//   fails, is running while a child is running (later children untouched),
//   and succeeds when all children succeed.
//
//   Fallback mirrors Sequence: succeeds as soon as a child succeeds, fails
//   only when every child has failed.
//
//   Parallel ticks all children concurrently, succeeds when at least k
//   children have succeeded, and fails exactly when success has become
//   unattainable: fewer than k children can still succeed.
Status oracle(NodeKind kind, const std::vector<Status>& cs, int k) {
  switch (kind) {
    case NodeKind::Sequence:
    case NodeKind::ReactiveSequence: {
      for (Status s : cs) {
        if (s == Status::FAILURE) return Status::FAILURE;
        if (s == Status::RUNNING) return Status::RUNNING;
      }
      return Status::SUCCESS;
    }
    case NodeKind::Fallback: {
      for (Status s : cs) {
        if (s == Status::SUCCESS) return Status::SUCCESS;
        if (s == Status::RUNNING) return Status::RUNNING;
      }
      return Status::FAILURE;
    }
    case NodeKind::Parallel: {
      int succ = 0;
      int can_still_succeed = 0;
      for (Status s : cs) {
        if (s == Status::SUCCESS) ++succ;
        if (s != Status::FAILURE) ++can_still_succeed;
      }
      if (succ >= k) return Status::SUCCESS;
      if (can_still_succeed < k) return Status::FAILURE;
      return Status::RUNNING;
    }
    default:
      return Status::FAILURE;
  }
}

const Status kLeafStatuses[] = {Status::RUNNING, Status::SUCCESS,
                                Status::FAILURE};

// Enumerates every child-status assignment for `count` children and calls
// fn(assignment).
template <typename Fn>
void for_each_assignment(int count, Fn&& fn) {
  std::vector<Status> cs(count);
  int total = 1;
  for (int i = 0; i < count; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    int c = code;
    for (int i = 0; i < count; ++i) {
      cs[i] = kLeafStatuses[c % 3];
      c /= 3;
    }
    fn(cs);
  }
}

std::string element_name(NodeKind kind) {
  return std::string(kind_name(kind));
}

// Builds a real tree with one control node over scripted leaves, ticks it
// once, and returns the root status.
Status engine_result(NodeKind kind, const std::vector<Status>& cs, int k) {
  ScriptLog log;
  Registry reg = scripted_registry(cs, &log);
  std::string attrs;
  if (kind == NodeKind::Parallel) attrs = " k=\"" + std::to_string(k) + "\"";
  auto def = parse_tree(control_xml(element_name(kind), cs.size(), attrs));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  return tree.tick();
}

}  // namespace

TEST_CASE("evaluate_control matches the brute-force oracle exhaustively") {
  const NodeKind kinds[] = {NodeKind::Sequence, NodeKind::ReactiveSequence,
                            NodeKind::Fallback, NodeKind::Parallel};
  int checked = 0;
  for (NodeKind kind : kinds) {
    for (int count = 1; count <= 3; ++count) {
      const int kmax = kind == NodeKind::Parallel ? count : 1;
      for (int k = 1; k <= kmax; ++k) {
        for_each_assignment(count, [&](const std::vector<Status>& cs) {
          const Status want = oracle(kind, cs, k);
          const Status got = evaluate_control(kind, cs, k);
          CAPTURE(element_name(kind));
          CAPTURE(count);
          CAPTURE(k);
          REQUIRE(got == want);
          ++checked;
        });
      }
    }
  }
  // 3 non-parallel kinds * (3+9+27) plus parallel k-variants (1+2+3 per count).
  CHECK(checked == 3 * 39 + (3 * 1 + 9 * 2 + 27 * 3));
}

TEST_CASE("a single engine tick over scripted leaves matches the oracle") {
  const NodeKind kinds[] = {NodeKind::Sequence, NodeKind::ReactiveSequence,
                            NodeKind::Fallback, NodeKind::Parallel};
  for (NodeKind kind : kinds) {
    for (int count = 1; count <= 3; ++count) {
      const int kmax = kind == NodeKind::Parallel ? count : 1;
      for (int k = 1; k <= kmax; ++k) {
        for_each_assignment(count, [&](const std::vector<Status>& cs) {
          CAPTURE(element_name(kind));
          REQUIRE(engine_result(kind, cs, k) == oracle(kind, cs, k));
        });
      }
    }
  }
}

TEST_CASE("sequence does not tick children right of the first non-success") {
  ScriptLog log;
  Registry reg = scripted_registry(
      {Status::SUCCESS, Status::RUNNING, Status::SUCCESS}, &log);
  auto def = parse_tree(control_xml("Sequence", 3));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  CHECK(tree.tick() == Status::RUNNING);
  CHECK(log.ticks == std::vector<int>{1, 1, 0});

  ScriptLog log2;
  Registry reg2 = scripted_registry(
      {Status::FAILURE, Status::SUCCESS, Status::SUCCESS}, &log2);
  auto tree2 = ExecutableTree::instantiate(def, reg2, nullptr);
  CHECK(tree2.tick() == Status::FAILURE);
  CHECK(log2.ticks == std::vector<int>{1, 0, 0});
}

TEST_CASE("fallback does not tick children right of the first non-failure") {
  ScriptLog log;
  Registry reg = scripted_registry(
      {Status::FAILURE, Status::SUCCESS, Status::FAILURE}, &log);
  auto def = parse_tree(control_xml("Fallback", 3));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  CHECK(tree.tick() == Status::SUCCESS);
  CHECK(log.ticks == std::vector<int>{1, 1, 0});
}

TEST_CASE("parallel ticks every unfinished child on every tick") {
  ScriptLog log;
  Registry reg = scripted_registry(
      {Status::RUNNING, Status::SUCCESS, Status::RUNNING}, &log);
  auto def = parse_tree(control_xml("Parallel", 3, " k=\"3\""));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  for (int i = 1; i <= 4; ++i) {
    CHECK(tree.tick() == Status::RUNNING);
    CHECK(log.ticks[0] == i);
    CHECK(log.ticks[2] == i);
  }
  // The finished child was ticked once and then latched.
  CHECK(log.ticks[1] == 1);
}

TEST_CASE("parallel succeeds the moment k successes are in") {
  // k=2 with one child already successful: second success on tick 3.
  Registry reg;
  reg.add("slow", [] {
    return std::make_unique<SequencedBehavior>(std::vector<Status>{
        Status::RUNNING, Status::RUNNING, Status::SUCCESS});
  });
  reg.add("fast", [] {
    return std::make_unique<SequencedBehavior>(
        std::vector<Status>{Status::SUCCESS});
  });
  auto def = parse_tree(
      "<BehaviorTree><Parallel k=\"2\">"
      "<Action name=\"slow\"/><Action name=\"fast\"/>"
      "</Parallel></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  CHECK(tree.tick() == Status::RUNNING);
  CHECK(tree.tick() == Status::RUNNING);
  CHECK(tree.tick() == Status::SUCCESS);
}

TEST_CASE("parallel fails once success is unattainable") {
  // k=2 over three children; two failures leave only one possible success.
  ScriptLog log;
  Registry reg = scripted_registry(
      {Status::FAILURE, Status::RUNNING, Status::FAILURE}, &log);
  auto def = parse_tree(control_xml("Parallel", 3, " k=\"2\""));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  CHECK(tree.tick() == Status::FAILURE);
}
