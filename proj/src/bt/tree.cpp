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

#include "cellkit/bt/tree.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cellkit::bt {

Status evaluate_control(NodeKind kind,
                        const std::vector<Status>& child_statuses, int k) {
  switch (kind) {
    case NodeKind::Sequence:
    case NodeKind::ReactiveSequence:
      for (Status s : child_statuses) {
        if (s != Status::SUCCESS) return s;
      }
      return Status::SUCCESS;
    case NodeKind::Fallback:
      for (Status s : child_statuses) {
        if (s != Status::FAILURE) return s;
      }
      return Status::FAILURE;
    case NodeKind::Parallel: {
      int succ = 0;
      int fail = 0;
      for (Status s : child_statuses) {
        if (s == Status::SUCCESS) ++succ;
        if (s == Status::FAILURE) ++fail;
      }
      if (succ >= k) return Status::SUCCESS;
      if (static_cast<int>(child_statuses.size()) - fail < k) {
        return Status::FAILURE;
      }
      return Status::RUNNING;
    }
    default:
      throw std::invalid_argument("evaluate_control: not a control kind");
  }
}

// Node base. tick() and halt() wrap the per-kind logic with status
// bookkeeping and trace emission so subclasses only implement traversal.
class TreeNode {
 public:
  TreeNode(NodeKind kind, std::string path)
      : kind_(kind), path_(std::move(path)) {}
  virtual ~TreeNode() = default;

  Status tick(TickContext& ctx) {
    Status next;
    try {
      next = tick_impl(ctx);
    } catch (const std::exception& e) {
      ctx.info(fmt::format("node {} raised: {}", path_, e.what()));
      next = Status::FAILURE;
    }
    if (next == Status::IDLE) {
      ctx.info(fmt::format("node {} attempted to return IDLE", path_));
      next = Status::FAILURE;
    }
    set_status(ctx, next);
    return next;
  }

  // Abandons the node: a RUNNING subtree is stopped, status reset to IDLE.
  void halt(TickContext& ctx) {
    if (status_ == Status::RUNNING) halt_impl(ctx);
    set_status(ctx, Status::IDLE);
  }

  Status status() const { return status_; }
  const std::string& path() const { return path_; }
  NodeKind kind() const { return kind_; }

  virtual void collect_paths(std::vector<std::string>& out) const {
    out.push_back(path_);
  }

 protected:
  virtual Status tick_impl(TickContext& ctx) = 0;
  virtual void halt_impl(TickContext& ctx) { (void)ctx; }

  void set_status(TickContext& ctx, Status next) {
    if (next == status_) return;
    if (ctx.trace) {
      ctx.trace(TraceEvent{ctx.tick_index, path_, status_, next,
                           ctx.clock ? ctx.clock->now_us() : 0});
    }
    status_ = next;
  }

  NodeKind kind_;
  std::string path_;
  Status status_ = Status::IDLE;
};

namespace {

class ControlNode : public TreeNode {
 public:
  ControlNode(NodeKind kind, std::string path,
              std::vector<std::unique_ptr<TreeNode>> children)
      : TreeNode(kind, std::move(path)), children_(std::move(children)) {}

  void collect_paths(std::vector<std::string>& out) const override {
    out.push_back(path_);
    for (const auto& c : children_) c->collect_paths(out);
  }

 protected:
  void halt_impl(TickContext& ctx) override { reset_children(ctx); }

  void reset_children(TickContext& ctx) {
    for (auto& c : children_) {
      if (c->status() != Status::IDLE) c->halt(ctx);
    }
  }

  std::vector<std::unique_ptr<TreeNode>> children_;
};

// Ticks children left to right, remembering its position across ticks, so
// completed children are not revisited within one pass.
class SequenceNode : public ControlNode {
 public:
  using ControlNode::ControlNode;

 protected:
  Status tick_impl(TickContext& ctx) override {
    if (status_ != Status::RUNNING) index_ = 0;
    while (index_ < children_.size()) {
      const Status s = children_[index_]->tick(ctx);
      if (s == Status::RUNNING) return Status::RUNNING;
      if (s == Status::FAILURE) {
        finish(ctx);
        return Status::FAILURE;
      }
      ++index_;
    }
    finish(ctx);
    return Status::SUCCESS;
  }

  void halt_impl(TickContext& ctx) override {
    ControlNode::halt_impl(ctx);
    index_ = 0;
  }

 private:
  void finish(TickContext& ctx) {
    reset_children(ctx);
    index_ = 0;
  }

  size_t index_ = 0;
};

// Re-ticks every child from the left on every tick; a RUNNING child halts
// all children to its right so stale state cannot linger.
class ReactiveSequenceNode : public ControlNode {
 public:
  using ControlNode::ControlNode;

 protected:
  Status tick_impl(TickContext& ctx) override {
    for (size_t i = 0; i < children_.size(); ++i) {
      const Status s = children_[i]->tick(ctx);
      if (s == Status::RUNNING) {
        for (size_t j = i + 1; j < children_.size(); ++j) {
          if (children_[j]->status() != Status::IDLE) children_[j]->halt(ctx);
        }
        return Status::RUNNING;
      }
      if (s == Status::FAILURE) {
        reset_children(ctx);
        return Status::FAILURE;
      }
    }
    reset_children(ctx);
    return Status::SUCCESS;
  }
};

class FallbackNode : public ControlNode {
 public:
  using ControlNode::ControlNode;

 protected:
  Status tick_impl(TickContext& ctx) override {
    if (status_ != Status::RUNNING) index_ = 0;
    while (index_ < children_.size()) {
      const Status s = children_[index_]->tick(ctx);
      if (s == Status::RUNNING) return Status::RUNNING;
      if (s == Status::SUCCESS) {
        finish(ctx);
        return Status::SUCCESS;
      }
      ++index_;
    }
    finish(ctx);
    return Status::FAILURE;
  }

  void halt_impl(TickContext& ctx) override {
    ControlNode::halt_impl(ctx);
    index_ = 0;
  }

 private:
  void finish(TickContext& ctx) {
    reset_children(ctx);
    index_ = 0;
  }

  size_t index_ = 0;
};

// Ticks every not-yet-finished child each tick; finished children keep
// their result until the node itself completes.
class ParallelNode : public ControlNode {
 public:
  ParallelNode(std::string path,
               std::vector<std::unique_ptr<TreeNode>> children, int k)
      : ControlNode(NodeKind::Parallel, std::move(path), std::move(children)),
        k_(k) {}

 protected:
  Status tick_impl(TickContext& ctx) override {
    int succ = 0;
    int fail = 0;
    for (auto& c : children_) {
      Status s = c->status();
      if (!is_terminal(s)) s = c->tick(ctx);
      if (s == Status::SUCCESS) ++succ;
      if (s == Status::FAILURE) ++fail;
    }
    const int n = static_cast<int>(children_.size());
    if (succ >= k_) {
      reset_children(ctx);
      return Status::SUCCESS;
    }
    if (n - fail < k_) {
      reset_children(ctx);
      return Status::FAILURE;
    }
    return Status::RUNNING;
  }

 private:
  int k_;
};

class TimeoutNode : public ControlNode {
 public:
  TimeoutNode(std::string path, std::unique_ptr<TreeNode> child, int64_t ms)
      : ControlNode(NodeKind::Timeout, std::move(path), {}), ms_(ms) {
    children_.push_back(std::move(child));
  }

 protected:
  Status tick_impl(TickContext& ctx) override {
    if (status_ != Status::RUNNING) start_us_ = ctx.clock->now_us();
    const Status s = children_[0]->tick(ctx);
    if (s == Status::RUNNING &&
        ctx.clock->now_us() - start_us_ >= ms_ * 1000) {
      children_[0]->halt(ctx);
      return Status::FAILURE;
    }
    if (is_terminal(s)) reset_children(ctx);
    return s;
  }

 private:
  int64_t ms_;
  int64_t start_us_ = 0;
};

// Re-ticks a failing child up to n more times; each re-tick is issued on a
// subsequent engine tick, not recursively within the same one.
class RetryNode : public ControlNode {
 public:
  RetryNode(std::string path, std::unique_ptr<TreeNode> child, int n)
      : ControlNode(NodeKind::Retry, std::move(path), {}), n_(n) {
    children_.push_back(std::move(child));
  }

 protected:
  Status tick_impl(TickContext& ctx) override {
    if (status_ != Status::RUNNING) tries_ = 0;
    const Status s = children_[0]->tick(ctx);
    if (s == Status::FAILURE && tries_ < n_) {
      ++tries_;
      children_[0]->halt(ctx);
      return Status::RUNNING;
    }
    if (is_terminal(s)) {
      reset_children(ctx);
      tries_ = 0;
    }
    return s;
  }

  void halt_impl(TickContext& ctx) override {
    ControlNode::halt_impl(ctx);
    tries_ = 0;
  }

 private:
  int n_;
  int tries_ = 0;
};

class LeafNode : public TreeNode {
 public:
  LeafNode(NodeKind kind, std::string path, std::unique_ptr<Behavior> behavior,
           ParamMap params)
      : TreeNode(kind, std::move(path)),
        behavior_(std::move(behavior)),
        params_(std::move(params)) {}

 protected:
  Status tick_impl(TickContext& ctx) override {
    Status s = behavior_->tick(ctx, params_);
    if (kind_ == NodeKind::Condition && s == Status::RUNNING) {
      ctx.info(fmt::format("condition {} returned RUNNING, mapped to FAILURE",
                           path_));
      s = Status::FAILURE;
    }
    return s;
  }

  void halt_impl(TickContext& ctx) override { behavior_->halt(ctx); }

 private:
  std::unique_ptr<Behavior> behavior_;
  ParamMap params_;
};

std::string child_path(const std::string& parent, const NodeSpec& spec,
                       size_t index, bool is_root) {
  std::string seg{kind_name(spec.kind)};
  if (!is_root) seg += fmt::format("[{}]", index);
  if (is_leaf_kind(spec.kind)) seg += ":" + spec.name;
  return is_root ? seg : parent + "/" + seg;
}

void collect_missing(const NodeSpec& spec, const Registry& registry,
                     std::vector<std::string>& missing) {
  if (is_leaf_kind(spec.kind)) {
    if (!registry.contains(spec.name)) missing.push_back(spec.name);
  }
  for (const auto& c : spec.children) collect_missing(c, registry, missing);
}

std::unique_ptr<TreeNode> build_node(const NodeSpec& spec,
                                     const Registry& registry,
                                     const std::string& parent_path,
                                     size_t index, bool is_root) {
  const std::string path = child_path(parent_path, spec, index, is_root);

  if (is_leaf_kind(spec.kind)) {
    auto behavior = registry.make(spec.name);
    behavior->init(spec.params);
    return std::make_unique<LeafNode>(spec.kind, path, std::move(behavior),
                                      spec.params);
  }

  std::vector<std::unique_ptr<TreeNode>> children;
  children.reserve(spec.children.size());
  for (size_t i = 0; i < spec.children.size(); ++i) {
    children.push_back(build_node(spec.children[i], registry, path, i, false));
  }

  switch (spec.kind) {
    case NodeKind::Sequence:
      return std::make_unique<SequenceNode>(NodeKind::Sequence, path,
                                            std::move(children));
    case NodeKind::ReactiveSequence:
      return std::make_unique<ReactiveSequenceNode>(NodeKind::ReactiveSequence,
                                                    path, std::move(children));
    case NodeKind::Fallback:
      return std::make_unique<FallbackNode>(NodeKind::Fallback, path,
                                            std::move(children));
    case NodeKind::Parallel:
      return std::make_unique<ParallelNode>(path, std::move(children), spec.k);
    case NodeKind::Timeout:
      return std::make_unique<TimeoutNode>(path, std::move(children[0]),
                                           spec.ms);
    case NodeKind::Retry:
      return std::make_unique<RetryNode>(path, std::move(children[0]), spec.n);
    default:
      throw std::logic_error("unreachable node kind");
  }
}

}  // namespace

ExecutableTree::ExecutableTree() = default;
ExecutableTree::ExecutableTree(ExecutableTree&&) noexcept = default;
ExecutableTree& ExecutableTree::operator=(ExecutableTree&&) noexcept = default;
ExecutableTree::~ExecutableTree() = default;

ExecutableTree ExecutableTree::instantiate(const TreeDefinition& def,
                                           const Registry& registry,
                                           std::shared_ptr<Blackboard> bb) {
  std::vector<std::string> missing;
  collect_missing(def.root, registry, missing);
  if (!missing.empty()) {
    std::string msg = "unknown behavior name(s):";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }

  ExecutableTree tree;
  tree.def_ = def;
  tree.bb_ = bb ? std::move(bb) : std::make_shared<Blackboard>();
  tree.root_ = build_node(def.root, registry, "", 0, true);
  tree.owned_clock_ = std::make_unique<SimClock>(SimClock::real_time());
  tree.clock_ = tree.owned_clock_.get();
  return tree;
}

TickContext ExecutableTree::make_context() {
  TickContext ctx;
  ctx.blackboard = bb_.get();
  ctx.clock = clock_;
  ctx.log = log_sink_;
  ctx.trace = trace_sink_;
  ctx.tick_index = tick_index_;
  return ctx;
}

Status ExecutableTree::tick() {
  TickContext ctx = make_context();
  const Status s = root_->tick(ctx);
  ++tick_index_;
  return s;
}

void ExecutableTree::halt() {
  TickContext ctx = make_context();
  root_->halt(ctx);
}

Status ExecutableTree::root_status() const { return root_->status(); }

RunResult ExecutableTree::run(double frequency_hz,
                              const std::function<bool()>& stop) {
  if (frequency_hz <= 0) {
    throw std::invalid_argument("run: frequency must be positive");
  }
  RunResult rr;
  auto saved_sink = trace_sink_;
  trace_sink_ = [&rr, &saved_sink](const TraceEvent& e) {
    rr.trace.push_back(e);
    if (saved_sink) saved_sink(e);
  };

  const double period_us = 1e6 / frequency_hz;
  const int64_t t0 = clock_->now_us();
  uint64_t i = 0;
  while (true) {
    const Status s = tick();
    ++rr.tick_count;
    rr.final_status = s;
    if (is_terminal(s) || (stop && stop())) break;
    ++i;
    const int64_t deadline =
        t0 + static_cast<int64_t>(std::llround(static_cast<double>(i) *
                                               period_us));
    if (clock_->now_us() > deadline) {
      ++rr.missed_deadlines;
    } else {
      clock_->sleep_until_us(deadline);
    }
  }

  trace_sink_ = std::move(saved_sink);
  return rr;
}

void ExecutableTree::set_clock(Clock* clock) { clock_ = clock; }

void ExecutableTree::set_log_sink(std::function<void(const std::string&)> sink) {
  log_sink_ = std::move(sink);
  bb_->set_logger(log_sink_);
}

void ExecutableTree::set_trace_sink(
    std::function<void(const TraceEvent&)> sink) {
  trace_sink_ = std::move(sink);
}

std::vector<std::string> ExecutableTree::node_paths() const {
  std::vector<std::string> out;
  root_->collect_paths(out);
  return out;
}

void Registry::add(const std::string& name, BehaviorFactory factory) {
  factories_[name] = std::move(factory);
}

bool Registry::contains(const std::string& name) const {
  return factories_.count(name) > 0;
}

std::unique_ptr<Behavior> Registry::make(const std::string& name) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) {
    throw std::runtime_error("unknown behavior name(s): " + name);
  }
  return it->second();
}

std::vector<std::string> Registry::names() const {
  std::vector<std::string> out;
  out.reserve(factories_.size());
  for (const auto& [k, v] : factories_) out.push_back(k);
  return out;
}

}  // namespace cellkit::bt
