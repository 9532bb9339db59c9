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
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "cellkit/common/types.hpp"

namespace cellkit::bt {

// Tagged value stored in the Blackboard. The ordering of alternatives is
// load-bearing: the snapshot codec uses (index + 1) as the type tag.
using Value = std::variant<std::string, int64_t, double, bool, Pose6D,
                           JointVector, Wrench, GraspRecord>;

// Key-value store shared across the nodes of one execution instance.
// Reads may run concurrently; writes are exclusive. The revision counter
// strictly increases on every successful write, including clear().
class Blackboard {
 public:
  void put(const std::string& key, Value value);

  std::optional<Value> get(const std::string& key) const;

  template <typename T>
  std::optional<T> get_as(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (auto* p = std::get_if<T>(&*v)) return *p;
    return std::nullopt;
  }

  bool has(const std::string& key) const;

  // True when the key holds boolean true. Used by guard conditions.
  bool flag(const std::string& key) const;

  uint64_t revision() const;

  // Drops all entries (one revision bump). Used when the executor starts a
  // fresh task cycle; the counter keeps growing so restarts stay detectable.
  void clear();

  // Entries in ascending key order, for the snapshot codec.
  std::vector<std::pair<std::string, Value>> sorted_entries() const;

  // Bulk-load used by snapshot restore. Replaces content and revision.
  void restore_raw(std::vector<std::pair<std::string, Value>> entries,
                   uint64_t revision);

  // Sink for the type-mismatch-on-overwrite warning. Last write still wins.
  void set_logger(std::function<void(const std::string&)> log);

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Value> entries_;
  uint64_t revision_ = 0;
  std::function<void(const std::string&)> log_;
};

}  // namespace cellkit::bt
