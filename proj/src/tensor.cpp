// Copyright 2026 The dsea Authors
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

#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

namespace dsea {

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::int64_t shape_numel(const Shape& shape) {
  std::int64_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

namespace detail {

void check_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have rank >= 1");
  for (auto e : shape) {
    if (e < 1) throw ShapeError("tensor extent must be >= 1, got " + shape_str(shape));
  }
}

template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> value,
                      std::vector<Tensor<T>> inputs, typename Node<T>::BackwardFn backward_fn) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
#ifndef NDEBUG
  for (T v : node->value) {
    if (!std::isfinite(v)) {
      bool finite_inputs = true;
      for (const auto& in : inputs)
        for (T iv : in.data()) finite_inputs = finite_inputs && std::isfinite(iv);
      if (finite_inputs) throw NumericError(std::string("non-finite output from op ") + op);
      break;
    }
  }
#endif
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (any) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (auto& in : inputs) node->parents.push_back(in.node_ptr());
    node->backward_fn = std::move(backward_fn);
  }
  return Tensor<T>(std::move(node));
}

}  // namespace detail

template <typename T>
Tensor<T> tensor_new(const Shape& shape, const Fill& fill, bool requires_grad) {
  detail::check_shape(shape);
  const auto n = static_cast<std::size_t>(shape_numel(shape));
  auto node = std::make_shared<Node<T>>();
  node->shape = shape;
  node->requires_grad = requires_grad;
  if (std::holds_alternative<FillZeros>(fill)) {
    node->value.assign(n, T(0));
  } else if (std::holds_alternative<FillOnes>(fill)) {
    node->value.assign(n, T(1));
  } else if (const auto* u = std::get_if<FillUniform>(&fill)) {
    if (!(u->hi >= u->lo)) throw ParameterError("uniform fill needs lo <= hi");
    std::mt19937_64 rng(u->seed);
    node->value.resize(n);
    for (auto& v : node->value) {
      // 53 random mantissa bits; independent of the standard library's
      // distribution implementations.
      const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v = static_cast<T>(u->lo + (u->hi - u->lo) * r);
    }
  } else {
    const auto& vals = std::get<FillValues>(fill).values;
    if (vals.size() != n) {
      throw ShapeError("from_values: " + std::to_string(vals.size()) +
                       " values for shape " + shape_str(shape));
    }
    node->value.resize(n);
    std::transform(vals.begin(), vals.end(), node->value.begin(),
                   [](double v) { return static_cast<T>(v); });
  }
  return Tensor<T>(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::zeros(const Shape& shape, bool requires_grad) {
  return tensor_new<T>(shape, FillZeros{}, requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::ones(const Shape& shape, bool requires_grad) {
  return tensor_new<T>(shape, FillOnes{}, requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(const Shape& shape, T value, bool requires_grad) {
  auto t = tensor_new<T>(shape, FillZeros{}, requires_grad);
  std::fill(t.node()->value.begin(), t.node()->value.end(), value);
  return t;
}

template <typename T>
Tensor<T> Tensor<T>::uniform(const Shape& shape, double lo, double hi, std::uint64_t seed,
                             bool requires_grad) {
  return tensor_new<T>(shape, FillUniform{lo, hi, seed}, requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::from_values(const Shape& shape, std::vector<T> values, bool requires_grad) {
  detail::check_shape(shape);
  if (static_cast<std::int64_t>(values.size()) != shape_numel(shape)) {
    throw ShapeError("from_values: " + std::to_string(values.size()) + " values for shape " +
                     shape_str(shape));
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = shape;
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor<T>(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return from_values({1}, {value}, requires_grad);
}

template <typename T>
void Tensor<T>::zero_grad() {
  node_->grad.clear();
  node_->swept = false;
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape()));
  return node_->value[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach(bool requires_grad) const {
  return from_values(shape(), node_->value, requires_grad);
}

template <typename T>
void backward(const Tensor<T>& loss) {
  if (!loss.defined()) throw ContractError("backward on an undefined tensor");
  if (loss.numel() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " + shape_str(loss.shape()));
  }
  Node<T>* root = loss.node();
  if (root->swept) throw StateError("backward already ran on this graph; rebuild it or zero_grad");
  if (!root->requires_grad) throw ContractError("loss does not depend on any requires_grad tensor");

  // Iterative post-order DFS; reversing it gives a topological order. The
  // order holds owning references because the sweep releases parent links.
  std::vector<std::shared_ptr<Node<T>>> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<std::shared_ptr<Node<T>>, std::size_t>> stack{{loss.node_ptr(), 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      const auto& p = node->parents[next++];
      if (p->requires_grad && visited.insert(p.get()).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  if (root->is_leaf()) {
    root->grad_sink()[0] += T(1);
    root->swept = true;
    return;
  }
  root->grad.assign(1, T(1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = it->get();
    if (node->is_leaf()) continue;
    if (!node->grad.empty()) node->backward_fn(node->grad);
    // Release the saved activations and intermediate grads.
    node->grad.clear();
    node->grad.shrink_to_fit();
    node->backward_fn = nullptr;
    node->parents.clear();
    node->swept = true;
  }
  // is_leaf() is now true for root, so mark explicitly for the repeat check.
  root->swept = true;
}

#define DSEA_INSTANTIATE(T)                                                                   \
  template class Tensor<T>;                                                                   \
  template Tensor<T> tensor_new<T>(const Shape&, const Fill&, bool);                          \
  template void backward<T>(const Tensor<T>&);                                                \
  template Tensor<T> detail::make_result<T>(const char*, Shape, std::vector<T>,               \
                                            std::vector<Tensor<T>>, Node<T>::BackwardFn);

DSEA_INSTANTIATE(float)
DSEA_INSTANTIATE(double)

#undef DSEA_INSTANTIATE

}  // namespace dsea
