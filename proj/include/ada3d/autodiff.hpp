// Copyright 2026 The Ada3D Authors. All Rights Reserved.
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

#include "ada3d/tensor.hpp"

namespace ada3d {

struct Node;
using NodePtr = std::shared_ptr<Node>;

/// One recorded value in the computation graph. Leaves have no parents and
/// no backward function; parameters are leaves with requires_grad set.
struct Node {
  std::string op;
  Tensor value;
  Tensor grad;
  bool has_grad = false;
  bool requires_grad = false;
  std::vector<NodePtr> parents;
  /// Reads this->grad and accumulates into parents that require gradients.
  std::function<void(Node&)> backward_fn;

  /// grad += g, allocating a zero gradient first if needed.
  void accumulate(const Tensor& g);
  /// Zero-initialized gradient buffer of value's shape.
  Tensor& grad_buffer();
};

/// Handle to a graph node. Cheap to copy; copies alias the same node.
class Var {
 public:
  Var();
  /// A leaf. Parameters pass requires_grad = true.
  explicit Var(Tensor value, bool requires_grad = false);
  explicit Var(NodePtr node) : node_(std::move(node)) {}

  const Tensor& value() const { return node_->value; }
  /// In-place access for optimizers; only valid on leaves.
  Tensor& mutable_value();
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_->requires_grad; }
  const std::string& op() const { return node_->op; }

  bool has_grad() const { return node_->has_grad; }
  /// Gradient accumulated by backward(); zeros if none reached this node.
  Tensor grad() const;
  void zero_grad();

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

/// Disables graph recording in its scope (evaluation, finite differences).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Records an operation. The backward function is kept only when recording
/// is enabled and some parent requires a gradient.
Var make_op(std::string op, Tensor value, std::vector<Var> parents,
            std::function<void(Node&)> backward_fn);

/// Reverse pass from a one-element output, seeding d(out)/d(out) = seed.
/// Leaf gradients accumulate across calls; intermediate gradients are reset.
/// Throws ContractError for a non-scalar output.
void backward(const Var& output, double seed = 1.0);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
Tensor finite_difference_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                              double h);

// Elementwise and reduction ops. Binary ops require identical shapes.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var relu(const Var& a);
/// Subgradient sign(0) = 0.
Var abs(const Var& a);
Var square(const Var& a);
Var sum(const Var& a);
Var mean(const Var& a);
Var reshape(const Var& a, Shape shape);
/// Concatenates along the last axis; all other extents must agree.
Var concat_last(const std::vector<Var>& parts);

}  // namespace ada3d
