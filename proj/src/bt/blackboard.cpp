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

#include "cellkit/bt/blackboard.hpp"

#include <mutex>

namespace cellkit::bt {

void Blackboard::put(const std::string& key, Value value) {
  std::function<void(const std::string&)> warn;
  {
    std::unique_lock lk(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second.index() != value.index() && log_) {
      warn = log_;
    }
    entries_[key] = std::move(value);
    ++revision_;
  }
  if (warn) warn("blackboard type changed on overwrite key=" + key);
}

std::optional<Value> Blackboard::get(const std::string& key) const {
  std::shared_lock lk(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool Blackboard::has(const std::string& key) const {
  std::shared_lock lk(mu_);
  return entries_.count(key) > 0;
}

bool Blackboard::flag(const std::string& key) const {
  std::shared_lock lk(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return false;
  if (auto* b = std::get_if<bool>(&it->second)) return *b;
  return false;
}

uint64_t Blackboard::revision() const {
  std::shared_lock lk(mu_);
  return revision_;
}

void Blackboard::clear() {
  std::unique_lock lk(mu_);
  entries_.clear();
  ++revision_;
}

std::vector<std::pair<std::string, Value>> Blackboard::sorted_entries() const {
  std::shared_lock lk(mu_);
  return {entries_.begin(), entries_.end()};
}

void Blackboard::restore_raw(std::vector<std::pair<std::string, Value>> entries,
                             uint64_t revision) {
  std::unique_lock lk(mu_);
  entries_.clear();
  for (auto& [k, v] : entries) entries_[k] = std::move(v);
  revision_ = revision;
}

void Blackboard::set_logger(std::function<void(const std::string&)> log) {
  std::unique_lock lk(mu_);
  log_ = std::move(log);
}

}  // namespace cellkit::bt
