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

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellkit::bt {

enum class NodeKind {
  Sequence,
  ReactiveSequence,
  Fallback,
  Parallel,
  Timeout,
  Retry,
  Action,
  Condition,
};

std::string_view kind_name(NodeKind k);

inline bool is_leaf_kind(NodeKind k) {
  return k == NodeKind::Action || k == NodeKind::Condition;
}
inline bool is_decorator_kind(NodeKind k) {
  return k == NodeKind::Timeout || k == NodeKind::Retry;
}

// Declarative node loaded from XML, before instantiation.
struct NodeSpec {
  NodeKind kind = NodeKind::Sequence;
  std::string name;                          // registry name, leaves only
  std::map<std::string, std::string> params; // leaf attributes minus "name"
  int k = 0;                                 // Parallel success threshold
  int64_t ms = 0;                            // Timeout budget
  int n = 1;                                 // Retry attempts after failure
  std::vector<NodeSpec> children;
  int line = 0;
  int col = 0;
};

struct TreeDefinition {
  NodeSpec root;
  std::string xml_text;  // original document, kept for snapshotting
};

// Raised for malformed XML and for schema violations (unknown element or
// attribute, arity errors, bad parameter values). Position is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) +
                           ", column " + std::to_string(col) + ")"),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Parses and validates a tree document. The schema is strict: elements
// outside the documented set and attributes outside each element's
// documented set are rejected, never ignored.
TreeDefinition parse_tree(const std::string& xml_text);

}  // namespace cellkit::bt
