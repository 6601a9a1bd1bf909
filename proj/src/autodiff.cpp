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


#include "ada3d/autodiff.hpp"

#include <unordered_set>
#include <utility>

#include "ada3d/error.hpp"

namespace ada3d {
namespace {

thread_local bool g_grad_enabled = true;

void require_same_shape(const char* op, const Var& a, const Var& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

// Post-order over the nodes that require gradients.
std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }
  return order;
}

}  // namespace

void Node::accumulate(const Tensor& g) {
  if (!has_grad) {
    if (g.shape() != value.shape()) {
      throw ShapeError("gradient " + to_string(g.shape()) + " for value " +
                       to_string(value.shape()) + " in op " + op);
    }
    grad = g;
    has_grad = true;
    return;
  }
  Tensor& buf = grad;
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += g[i];
}

Tensor& Node::grad_buffer() {
  if (!has_grad) {
    grad = Tensor(value.shape());
    has_grad = true;
  }
  return grad;
}

Var::Var() : node_(std::make_shared<Node>()) { node_->op = "leaf"; }

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->op = "leaf";
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Tensor& Var::mutable_value() {
  if (!node_->parents.empty() || node_->backward_fn) {
    throw ContractError("mutable_value() on non-leaf node '" + node_->op + "'");
  }
  return node_->value;
}

Tensor Var::grad() const {
  if (node_->has_grad) return node_->grad;
  return Tensor(node_->value.shape());
}

void Var::zero_grad() {
  node_->has_grad = false;
  node_->grad = Tensor();
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

Var make_op(std::string op, Tensor value, std::vector<Var> parents,
            std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->op = std::move(op);
  node->value = std::move(value);
  bool needs = false;
  if (g_grad_enabled) {
    for (const Var& p : parents) needs = needs || p.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (const Var& p : parents) node->parents.push_back(p.node());
    node->backward_fn = std::move(backward_fn);
  }
  return Var(std::move(node));
}

void backward(const Var& output, double seed) {
  if (output.value().size() != 1) {
    throw ContractError("backward() needs a scalar output, got " + to_string(output.shape()));
  }
  if (!output.requires_grad()) return;
  Node* root = output.node().get();
  const std::vector<Node*> order = topological_order(root);
  for (Node* n : order) {
    if (!n->parents.empty()) {
      n->has_grad = false;
      n->grad = Tensor();
    }
  }
  root->accumulate(Tensor(root->value.shape(), seed));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->has_grad) n->backward_fn(*n);
  }
  // Interior gradients are transient; release them with the pass.
  for (Node* n : order) {
    if (!n->parents.empty()) {
      n->has_grad = false;
      n->grad = Tensor();
    }
  }
}

Tensor finite_difference_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                              double h) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  Tensor g(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Var add(const Var& a, const Var& b) {
  require_same_shape("add", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return make_op("add", std::move(out), {a, b}, [](Node& n) {
    for (auto& p : n.parents) {
      if (p->requires_grad) p->accumulate(n.grad);
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape("sub", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return make_op("sub", std::move(out), {a, b}, [](Node& n) {
    if (n.parents[0]->requires_grad) n.parents[0]->accumulate(n.grad);
    if (n.parents[1]->requires_grad) {
      Tensor& gb = n.parents[1]->grad_buffer();
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= n.grad[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape("mul", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return make_op("mul", std::move(out), {a, b}, [](Node& n) {
    const Tensor& av = n.parents[0]->value;
    const Tensor& bv = n.parents[1]->value;
    if (n.parents[0]->requires_grad) {
      Tensor& ga = n.parents[0]->grad_buffer();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i] * bv[i];
    }
    if (n.parents[1]->requires_grad) {
      Tensor& gb = n.parents[1]->grad_buffer();
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += n.grad[i] * av[i];
    }
  });
}

Var scale(const Var& a, double s) {
  Tensor out = a.value();
  for (double& v : out.data()) v *= s;
  return make_op("scale", std::move(out), {a}, [s](Node& n) {
    Tensor& ga = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s * n.grad[i];
  });
}

Var relu(const Var& a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return make_op("relu", std::move(out), {a}, [](Node& n) {
    const Tensor& x = n.parents[0]->value;
    Tensor& ga = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      if (x[i] > 0.0) ga[i] += n.grad[i];
    }
  });
}

Var abs(const Var& a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = v < 0.0 ? -v : v;
  return make_op("abs", std::move(out), {a}, [](Node& n) {
    const Tensor& x = n.parents[0]->value;
    Tensor& ga = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < ga.size(); ++i) {
      if (x[i] > 0.0) {
        ga[i] += n.grad[i];
      } else if (x[i] < 0.0) {
        ga[i] -= n.grad[i];
      }
    }
  });
}

Var square(const Var& a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = v * v;
  return make_op("square", std::move(out), {a}, [](Node& n) {
    const Tensor& x = n.parents[0]->value;
    Tensor& ga = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += 2.0 * x[i] * n.grad[i];
  });
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return make_op("sum", Tensor::scalar(s), {a}, [](Node& n) {
    const double g = n.grad[0];
    Tensor& ga = n.parents[0]->grad_buffer();
    for (double& v : ga.data()) v += g;
  });
}

Var mean(const Var& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const double inv = 1.0 / static_cast<double>(a.value().size());
  return make_op("mean", Tensor::scalar(s * inv), {a}, [inv](Node& n) {
    const double g = n.grad[0] * inv;
    Tensor& ga = n.parents[0]->grad_buffer();
    for (double& v : ga.data()) v += g;
  });
}

Var reshape(const Var& a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  return make_op("reshape", std::move(out), {a}, [](Node& n) {
    Tensor& ga = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i];
  });
}

Var concat_last(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_last: no inputs");
  Shape lead = parts[0].shape();
  lead.pop_back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    Shape s = p.shape();
    const std::size_t w = s.back();
    s.pop_back();
    if (s != lead) {
      throw ShapeError("concat_last: leading extents " + to_string(s) + " vs " + to_string(lead));
    }
    widths.push_back(w);
    total += w;
  }
  const std::size_t rows = numel(lead);
  Shape out_shape = lead;
  out_shape.push_back(total);
  Tensor out(out_shape);
  std::size_t col = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < widths[k]; ++c) out[r * total + col + c] = v[r * widths[k] + c];
    }
    col += widths[k];
  }
  return make_op("concat_last", std::move(out), parts, [widths, rows, total](Node& n) {
    std::size_t col = 0;
    for (std::size_t k = 0; k < n.parents.size(); ++k) {
      if (n.parents[k]->requires_grad) {
        Tensor& g = n.parents[k]->grad_buffer();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < widths[k]; ++c) g[r * widths[k] + c] += n.grad[r * total + col + c];
        }
      }
      col += widths[k];
    }
  });
}

}  // namespace ada3d
