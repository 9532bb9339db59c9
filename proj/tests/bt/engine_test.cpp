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

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "cellkit/bt/tree.hpp"
#include "helpers.hpp"

using namespace cellkit;
using namespace cellkit::bt;
using namespace cellkit::bt::testutil;

namespace {

// Flips between statuses under external control.
class LatchBehavior : public Behavior {
 public:
  explicit LatchBehavior(Status* cell) : cell_(cell) {}
  Status tick(TickContext&, const ParamMap&) override { return *cell_; }

 private:
  Status* cell_;
};

}  // namespace

TEST_CASE("sequence remembers its position while running") {
  ScriptLog log;
  Registry reg = scripted_registry(
      {Status::SUCCESS, Status::RUNNING, Status::SUCCESS}, &log);
  auto def = parse_tree(control_xml("Sequence", 3));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);

  CHECK(tree.tick() == Status::RUNNING);
  CHECK(tree.tick() == Status::RUNNING);
  // The completed first child is not revisited within the pass.
  CHECK(log.ticks == std::vector<int>{1, 2, 0});
}

TEST_CASE("reactive sequence re-ticks from the left every tick") {
  ScriptLog log;
  Registry reg = scripted_registry({Status::SUCCESS, Status::RUNNING}, &log);
  auto def = parse_tree(control_xml("ReactiveSequence", 2));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);

  CHECK(tree.tick() == Status::RUNNING);
  CHECK(tree.tick() == Status::RUNNING);
  CHECK(log.ticks == std::vector<int>{2, 2});
}

TEST_CASE("reactive sequence halts running right-siblings when a guard flips") {
  Status guard = Status::SUCCESS;
  ScriptLog log;
  log.ticks.assign(2, 0);
  log.halts.assign(2, 0);

  Registry reg;
  reg.add("guard", [&] { return std::make_unique<LatchBehavior>(&guard); });
  reg.add("work", [&] {
    return std::make_unique<ScriptedBehavior>(Status::RUNNING, &log, 1);
  });
  auto def = parse_tree(
      "<BehaviorTree><ReactiveSequence>"
      "<Condition name=\"guard\"/><Action name=\"work\"/>"
      "</ReactiveSequence></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);

  CHECK(tree.tick() == Status::RUNNING);
  CHECK(log.halts[1] == 0);

  guard = Status::FAILURE;
  CHECK(tree.tick() == Status::FAILURE);
  // The running action was abandoned, not left dangling.
  CHECK(log.halts[1] == 1);
}

TEST_CASE("timeout fails its child on the first tick after the budget") {
  FakeClock fake(0);
  Registry reg;
  ScriptLog log;
  log.ticks.assign(1, 0);
  log.halts.assign(1, 0);
  reg.add("stuck", [&] {
    return std::make_unique<ScriptedBehavior>(Status::RUNNING, &log, 0);
  });
  auto def = parse_tree(
      "<BehaviorTree><Timeout ms=\"50\"><Action name=\"stuck\"/></Timeout>"
      "</BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  tree.set_clock(&fake);

  CHECK(tree.tick() == Status::RUNNING);
  fake.advance_us(49'000);
  CHECK(tree.tick() == Status::RUNNING);
  fake.advance_us(1'000);  // exactly 50 ms since the first tick
  CHECK(tree.tick() == Status::FAILURE);
  CHECK(log.halts[0] == 1);
}

TEST_CASE("timeout passes a child result through and resets for reuse") {
  FakeClock fake(0);
  Registry reg;
  reg.add("twostep", [] {
    return std::make_unique<SequencedBehavior>(
        std::vector<Status>{Status::RUNNING, Status::SUCCESS});
  });
  auto def = parse_tree(
      "<BehaviorTree><Timeout ms=\"1000\"><Action name=\"twostep\"/></Timeout>"
      "</BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  tree.set_clock(&fake);

  CHECK(tree.tick() == Status::RUNNING);
  fake.advance_us(10'000);
  CHECK(tree.tick() == Status::SUCCESS);
}

TEST_CASE("retry issues up to n re-ticks after failure") {
  int attempts = 0;
  Registry reg;
  reg.add("flaky", [&] {
    class Counting : public Behavior {
     public:
      explicit Counting(int* n) : n_(n) {}
      Status tick(TickContext&, const ParamMap&) override {
        ++*n_;
        return Status::FAILURE;
      }
      int* n_;
    };
    return std::make_unique<Counting>(&attempts);
  });
  auto def = parse_tree(
      "<BehaviorTree><Retry n=\"3\"><Action name=\"flaky\"/></Retry>"
      "</BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);

  Status s = Status::RUNNING;
  int ticks = 0;
  while (s == Status::RUNNING && ticks < 100) {
    s = tree.tick();
    ++ticks;
  }
  CHECK(s == Status::FAILURE);
  // One initial attempt plus three retries.
  CHECK(attempts == 4);

  // A fresh pass gets a fresh retry budget.
  s = Status::RUNNING;
  while (s == Status::RUNNING) s = tree.tick();
  CHECK(attempts == 8);
}

TEST_CASE("retry stops early on success") {
  Registry reg;
  reg.add("second_try", [] {
    return std::make_unique<SequencedBehavior>(
        std::vector<Status>{Status::FAILURE, Status::SUCCESS});
  });
  auto def = parse_tree(
      "<BehaviorTree><Retry n=\"3\"><Action name=\"second_try\"/></Retry>"
      "</BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  CHECK(tree.tick() == Status::RUNNING);
  CHECK(tree.tick() == Status::SUCCESS);
}

TEST_CASE("a throwing leaf becomes FAILURE at that leaf and is logged") {
  Registry reg;
  reg.add("boom", [] {
    class Boom : public Behavior {
      Status tick(TickContext&, const ParamMap&) override {
        throw std::runtime_error("synthetic fault");
      }
    };
    return std::make_unique<Boom>();
  });
  reg.add("ok", [] {
    return std::make_unique<SequencedBehavior>(
        std::vector<Status>{Status::SUCCESS});
  });
  auto def = parse_tree(
      "<BehaviorTree><Fallback>"
      "<Action name=\"boom\"/><Action name=\"ok\"/>"
      "</Fallback></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  std::vector<std::string> lines;
  tree.set_log_sink([&](const std::string& l) { lines.push_back(l); });

  // Tick does not abort; the fault is contained at the leaf.
  CHECK(tree.tick() == Status::SUCCESS);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].find("synthetic fault") != std::string::npos);
  CHECK(lines[0].find("boom") != std::string::npos);
}

TEST_CASE("a condition returning RUNNING is coerced to FAILURE and logged") {
  Registry reg;
  reg.add("lazy", [] {
    return std::make_unique<SequencedBehavior>(
        std::vector<Status>{Status::RUNNING});
  });
  auto def = parse_tree(
      "<BehaviorTree><Condition name=\"lazy\"/></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  std::vector<std::string> lines;
  tree.set_log_sink([&](const std::string& l) { lines.push_back(l); });
  CHECK(tree.tick() == Status::FAILURE);
  CHECK(lines.size() == 1);
}

TEST_CASE("instantiate lists every missing behavior name") {
  auto def = parse_tree(
      "<BehaviorTree><Sequence>"
      "<Action name=\"known\"/><Action name=\"ghost\"/>"
      "<Condition name=\"phantom\"/>"
      "</Sequence></BehaviorTree>");
  Registry reg;
  reg.add("known", [] {
    return std::make_unique<SequencedBehavior>(
        std::vector<Status>{Status::SUCCESS});
  });
  try {
    auto tree = ExecutableTree::instantiate(def, reg, nullptr);
    FAIL("expected instantiation to throw");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("ghost") != std::string::npos);
    CHECK(msg.find("phantom") != std::string::npos);
    CHECK(msg.find(" known") == std::string::npos);
  }
}

TEST_CASE("identical behavior responses give identical traces modulo time") {
  auto run_once = [](std::vector<TraceEvent>* trace) {
    Registry reg;
    reg.add("worker", [] {
      return std::make_unique<SequencedBehavior>(std::vector<Status>{
          Status::RUNNING, Status::RUNNING, Status::SUCCESS});
    });
    reg.add("fallback_worker", [] {
      return std::make_unique<SequencedBehavior>(
          std::vector<Status>{Status::FAILURE, Status::SUCCESS});
    });
    auto def = parse_tree(
        "<BehaviorTree><Sequence>"
        "<Fallback><Action name=\"fallback_worker\"/>"
        "<Action name=\"worker\"/></Fallback>"
        "<Action name=\"worker\"/>"
        "</Sequence></BehaviorTree>");
    auto tree = ExecutableTree::instantiate(def, reg, nullptr);
    tree.set_trace_sink([trace](const TraceEvent& e) { trace->push_back(e); });
    while (!is_terminal(tree.tick())) {
    }
  };

  std::vector<TraceEvent> a;
  std::vector<TraceEvent> b;
  run_once(&a);
  run_once(&b);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tick_index == b[i].tick_index);
    CHECK(a[i].node_path == b[i].node_path);
    CHECK(a[i].old_status == b[i].old_status);
    CHECK(a[i].new_status == b[i].new_status);
  }
}

TEST_CASE("run finishes a trivial tree in one tick") {
  Registry reg;
  reg.add("yes", [] {
    return std::make_unique<SequencedBehavior>(
        std::vector<Status>{Status::SUCCESS});
  });
  auto def =
      parse_tree("<BehaviorTree><Condition name=\"yes\"/></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  auto rr = tree.run(1000.0);
  CHECK(rr.final_status == Status::SUCCESS);
  CHECK(rr.tick_count == 1);
  CHECK(rr.missed_deadlines == 0);
}

TEST_CASE("run honors an immediately-true stop predicate") {
  ScriptLog log;
  Registry reg = scripted_registry({Status::RUNNING}, &log);
  auto def = parse_tree(control_xml("Sequence", 1));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  auto rr = tree.run(1000.0, [] { return true; });
  CHECK(rr.tick_count == 1);
  CHECK(rr.final_status == Status::RUNNING);
}

TEST_CASE("run holds its frequency on an idle tree") {
  ScriptLog log;
  Registry reg = scripted_registry({Status::RUNNING}, &log);
  auto def = parse_tree(control_xml("Sequence", 1));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);

  SimClock sim = SimClock::real_time();
  tree.set_clock(&sim);
  const int64_t start = sim.now_us();
  auto rr = tree.run(1000.0, [&] { return sim.now_us() - start >= 1'000'000; });
  // One simulated second at 1 kHz.
  CHECK(rr.tick_count >= 900);
  CHECK(rr.tick_count <= 1100);
}

TEST_CASE("run counts missed deadlines instead of failing") {
  Registry reg;
  reg.add("slowpoke", [] {
    class Slow : public Behavior {
      Status tick(TickContext&, const ParamMap&) override {
        std::this_thread::sleep_for(std::chrono::milliseconds(3));
        return Status::RUNNING;
      }
    };
    return std::make_unique<Slow>();
  });
  auto def = parse_tree(
      "<BehaviorTree><Action name=\"slowpoke\"/></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  int ticks = 0;
  auto rr = tree.run(1000.0, [&] { return ++ticks >= 20; });
  CHECK(rr.missed_deadlines >= 15);
}

TEST_CASE("halting a tree resets every node to IDLE and notifies leaves") {
  ScriptLog log;
  Registry reg =
      scripted_registry({Status::SUCCESS, Status::RUNNING}, &log);
  auto def = parse_tree(control_xml("Sequence", 2));
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  CHECK(tree.tick() == Status::RUNNING);
  tree.halt();
  CHECK(tree.root_status() == Status::IDLE);
  CHECK(log.halts[1] == 1);

  // The tree is reusable after a halt.
  CHECK(tree.tick() == Status::RUNNING);
  CHECK(log.ticks[0] == 2);
}

TEST_CASE("idle ticks on a twenty-node tree stay under 200us at p99") {
  // A sequence over 19 always-running actions, 20 nodes counting the root.
  // Every tick is a short hop to the first leaf and back, which is the
  // steady-state cost the executor pays while a skill is in flight.
  Registry reg;
  reg.add("hold", [] {
    class Hold : public Behavior {
      Status tick(TickContext&, const ParamMap&) override {
        return Status::RUNNING;
      }
    };
    return std::make_unique<Hold>();
  });
  std::string xml = "<BehaviorTree><Sequence>";
  for (int i = 0; i < 19; ++i) xml += "<Action name=\"hold\"/>";
  xml += "</Sequence></BehaviorTree>";
  auto tree = ExecutableTree::instantiate(parse_tree(xml), reg, nullptr);

  std::vector<double> us;
  us.reserve(2000);
  for (int i = 0; i < 2000; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    tree.tick();
    auto t1 = std::chrono::steady_clock::now();
    us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  std::sort(us.begin(), us.end());
  const double p99 = us[static_cast<size_t>(us.size() * 0.99)];
  CHECK(p99 < 200.0);
}

TEST_CASE("node paths are unique, stable and space-free") {
  ScriptLog log;
  Registry reg = scripted_registry(
      {Status::SUCCESS, Status::SUCCESS, Status::SUCCESS}, &log);
  auto def = parse_tree(
      "<BehaviorTree><Sequence>"
      "<Fallback><Action name=\"s0\"/><Action name=\"s1\"/></Fallback>"
      "<Action name=\"s2\"/>"
      "</Sequence></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  auto paths = tree.node_paths();
  REQUIRE(paths.size() == 5);
  CHECK(paths[0] == "Sequence");
  CHECK(paths[1] == "Sequence/Fallback[0]");
  CHECK(paths[2] == "Sequence/Fallback[0]/Action[0]:s0");
  CHECK(paths[3] == "Sequence/Fallback[0]/Action[1]:s1");
  CHECK(paths[4] == "Sequence/Action[1]:s2");
  for (const auto& p : paths) {
    CHECK(p.find(' ') == std::string::npos);
  }
}
