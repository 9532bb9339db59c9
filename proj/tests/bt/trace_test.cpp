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

#include <stdexcept>
#include <string>
#include <vector>

#include "cellkit/bt/trace.hpp"
#include "cellkit/bt/tree.hpp"
#include "helpers.hpp"

using namespace cellkit::bt;
using namespace cellkit::bt::testutil;

TEST_CASE("a trace line is five space-separated fields") {
  TraceEvent e{12, "Sequence/Action[1]:Grasp", Status::IDLE, Status::RUNNING,
               4'501'250};
  CHECK(format_trace_line(e) ==
        "12 Sequence/Action[1]:Grasp IDLE RUNNING 4501250");
  CHECK(parse_trace_line(format_trace_line(e)) == e);
}

TEST_CASE("parse and format are inverse over a generated trace") {
  ScriptLog log;
  Registry reg = scripted_registry(
      {Status::SUCCESS, Status::FAILURE, Status::SUCCESS}, &log);
  auto def = parse_tree(
      "<BehaviorTree><Fallback>"
      "<Action name=\"s1\"/><Action name=\"s2\"/>"
      "</Fallback></BehaviorTree>");
  auto tree = ExecutableTree::instantiate(def, reg, nullptr);
  std::vector<TraceEvent> events;
  tree.set_trace_sink([&](const TraceEvent& e) { events.push_back(e); });
  tree.tick();
  REQUIRE(!events.empty());

  const std::string text = format_trace(events);
  CHECK(parse_trace(text) == events);
  CHECK(parse_trace(format_trace(parse_trace(text))) == events);
}

TEST_CASE("malformed trace lines are rejected") {
  CHECK_THROWS_AS(parse_trace_line(""), std::runtime_error);
  CHECK_THROWS_AS(parse_trace_line("1 Sequence IDLE RUNNING"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_trace_line("1 Sequence IDLE RUNNING 5 extra"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_trace_line("1 Sequence IDLE SPINNING 5"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_trace_line("x Sequence IDLE RUNNING 5"),
                  std::runtime_error);
}

TEST_CASE("replay reproduces the status sequence in order") {
  std::vector<TraceEvent> events{
      {0, "Sequence", Status::IDLE, Status::RUNNING, 100},
      {0, "Sequence/Action[0]:a", Status::IDLE, Status::RUNNING, 101},
      {1, "Sequence/Action[0]:a", Status::RUNNING, Status::SUCCESS, 205},
      {1, "Sequence", Status::RUNNING, Status::SUCCESS, 206},
  };
  auto seq = replay(events);
  REQUIRE(seq.size() == 4);
  CHECK(seq[0] == std::pair<std::string, Status>{"Sequence", Status::RUNNING});
  CHECK(seq[2].second == Status::SUCCESS);
  CHECK(seq[3].first == "Sequence");
}

TEST_CASE("replay rejects a trace whose tick index goes backwards") {
  std::vector<TraceEvent> events{
      {5, "Sequence", Status::IDLE, Status::RUNNING, 100},
      {4, "Sequence", Status::RUNNING, Status::SUCCESS, 90},
  };
  CHECK_THROWS_AS(replay(events), std::runtime_error);
}

TEST_CASE("parse_trace skips blank lines and keeps order") {
  const std::string text =
      "0 Fallback IDLE RUNNING 10\n"
      "\n"
      "0 Fallback/Action[0]:probe IDLE FAILURE 11\n"
      "1 Fallback RUNNING SUCCESS 20\n";
  auto events = parse_trace(text);
  REQUIRE(events.size() == 3);
  CHECK(events[1].node_path == "Fallback/Action[0]:probe");
  CHECK(events[2].tick_index == 1);
}
