// Copyright 2026 The VEGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vegan/nn/autograd.hpp"

#include <unordered_map>
#include <unordered_set>

#include "vegan/error.hpp"
#include "vegan/nn/ops.hpp"

namespace vegan::nn {

namespace {
thread_local bool t_grad_enabled = true;
}

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

namespace {
class GradModeGuard {
 public:
  explicit GradModeGuard(bool enabled) : previous_(t_grad_enabled) { t_grad_enabled = enabled; }
  ~GradModeGuard() { t_grad_enabled = previous_; }

 private:
  bool previous_;
};
}  // namespace

Var Var::constant(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->op = "const";
  return Var(std::move(n));
}

Var Var::leaf(Tensor value, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  return Var(std::move(n));
}

const Tensor& Var::value() const {
  if (!node_) fail(ErrorCode::InvalidArgument, "access to undefined Var");
  return node_->value;
}

Tensor& Var::mutable_value() {
  if (!node_) fail(ErrorCode::InvalidArgument, "access to undefined Var");
  if (node_->backward) fail(ErrorCode::InvalidArgument, "in-place update of a non-leaf value");
  return node_->value;
}

bool Var::requires_grad() const { return node_ && node_->requires_grad; }

Var make_result(Tensor value, std::vector<Var> inputs, BackwardFn fn, const char* op, bool twice_differentiable) {
  bool any = false;
  if (t_grad_enabled) {
    for (const Var& v : inputs) any = any || v.requires_grad();
  }
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->op = op;
  if (any) {
    n->requires_grad = true;
    n->inputs = std::move(inputs);
    n->backward = std::move(fn);
    n->twice_differentiable = twice_differentiable;
  }
  return Var(std::move(n));
}

std::vector<Var> grad(const Var& output, const std::vector<Var>& inputs, bool create_graph) {
  if (!output.defined() || output.numel() != 1) fail(ErrorCode::ShapeError, "grad() needs a scalar output");
  std::vector<Var> result(inputs.size());
  if (!output.requires_grad()) return result;

  // Iterative post-order DFS gives a topological order (inputs before users).
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{output.node(), 0}};
  seen.insert(output.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].node();
      if (child && child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  std::unordered_set<Node*> targets;
  for (const Var& v : inputs) targets.insert(v.node());
  std::unordered_set<Node*> relevant;
  for (Node* n : order) {
    bool r = targets.count(n) > 0;
    for (const Var& in : n->inputs) r = r || relevant.count(in.node()) > 0;
    if (r) relevant.insert(n);
  }

  std::unordered_map<Node*, Var> grads;
  grads[output.node()] = Var::constant(Tensor(output.shape(), 1.0));
  GradModeGuard mode(create_graph);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->backward || !relevant.count(n)) continue;
    auto g = grads.find(n);
    if (g == grads.end()) continue;
    if (create_graph && !n->twice_differentiable) {
      fail(ErrorCode::InvalidArgument, std::string("op '") + n->op + "' does not support higher-order gradients");
    }
    std::vector<bool> needs(n->inputs.size());
    bool any = false;
    for (std::size_t i = 0; i < needs.size(); ++i) {
      needs[i] = n->inputs[i].requires_grad() && relevant.count(n->inputs[i].node()) > 0;
      any = any || needs[i];
    }
    if (!any) continue;
    const Var gout = g->second;
    if (!create_graph && !targets.count(n)) grads.erase(g);
    std::vector<Var> gin = n->backward(gout, needs);
    for (std::size_t i = 0; i < gin.size(); ++i) {
      if (!needs[i] || !gin[i].defined()) continue;
      Node* key = n->inputs[i].node();
      auto existing = grads.find(key);
      if (existing == grads.end()) {
        grads.emplace(key, gin[i]);
      } else {
        existing->second = add(existing->second, gin[i]);
      }
    }
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto g = grads.find(inputs[i].node());
    result[i] = g != grads.end() ? g->second : Var::constant(Tensor(inputs[i].shape(), 0.0));
  }
  return result;
}

}  // namespace vegan::nn
