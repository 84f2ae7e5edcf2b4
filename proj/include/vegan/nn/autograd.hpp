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

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vegan/nn/tensor.hpp"

namespace vegan::nn {

struct Node;

/// Handle to a value in the computation graph. Copies share the node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var constant(Tensor value);
  /// Graph leaf; parameters and gradient-penalty interpolates are leaves.
  static Var leaf(Tensor value, bool requires_grad = true);

  bool defined() const noexcept { return node_ != nullptr; }
  const Tensor& value() const;
  /// In-place access for optimizer updates; only valid on leaves.
  Tensor& mutable_value();
  const std::vector<int>& shape() const { return value().shape(); }
  int dim(int i) const { return value().dim(i); }
  std::size_t numel() const { return value().numel(); }
  double item() const { return value().item(); }
  bool requires_grad() const;
  Var detach() const { return constant(value()); }
  Node* node() const noexcept { return node_.get(); }

 private:
  std::shared_ptr<Node> node_;
};

/// Receives the gradient w.r.t. the node output and returns one gradient per
/// input (undefined Var where needs[i] is false). Implementations express
/// the gradient with Var ops, which makes them differentiable again when the
/// backward pass runs with create_graph.
using BackwardFn = std::function<std::vector<Var>(const Var& grad_out, const std::vector<bool>& needs)>;

struct Node {
  Tensor value;
  bool requires_grad = false;
  std::vector<Var> inputs;
  BackwardFn backward;
  bool twice_differentiable = true;
  const char* op = "leaf";
};

bool grad_enabled();

/// Disables graph recording in the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Records an op result. Without grad mode, or when no input requires a
/// gradient, the result is a constant and `fn` is dropped.
Var make_result(Tensor value, std::vector<Var> inputs, BackwardFn fn, const char* op,
                bool twice_differentiable = true);

/// Gradients of a scalar `output` w.r.t. each of `inputs`. With create_graph
/// the returned gradients are themselves differentiable graph values.
std::vector<Var> grad(const Var& output, const std::vector<Var>& inputs, bool create_graph = false);

}  // namespace vegan::nn
