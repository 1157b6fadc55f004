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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace dsea {

using Shape = std::vector<std::int64_t>;

// Scalar precision of a graph. train32 maps to Tensor<float>, check64 to
// Tensor<double>; mixing the two in one graph does not compile.
enum class Precision { train32, check64 };

std::string shape_str(const Shape& shape);
std::int64_t shape_numel(const Shape& shape);

template <typename T>
struct Node {
  using BackwardFn = std::function<void(const std::vector<T>& out_grad)>;

  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until something accumulates into it
  bool requires_grad = false;
  bool swept = false;  // backward already ran through this node
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward_fn;

  bool is_leaf() const { return !backward_fn; }

  // Grad buffer for accumulation, allocated on first use. Null when this node
  // does not take part in differentiation.
  T* grad_sink() {
    if (!requires_grad) return nullptr;
    if (grad.empty()) grad.assign(value.size(), T(0));
    return grad.data();
  }
};

struct FillZeros {};
struct FillOnes {};
struct FillUniform {
  double lo = 0.0;
  double hi = 1.0;
  std::uint64_t seed = 0;
};
struct FillValues {
  std::vector<double> values;
};
using Fill = std::variant<FillZeros, FillOnes, FillUniform, FillValues>;

// Shared handle to a graph node. Copies alias the same node.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor ones(const Shape& shape, bool requires_grad = false);
  static Tensor full(const Shape& shape, T value, bool requires_grad = false);
  static Tensor uniform(const Shape& shape, double lo, double hi, std::uint64_t seed,
                        bool requires_grad = false);
  static Tensor from_values(const Shape& shape, std::vector<T> values,
                            bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::int64_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t numel() const { return node_->value.size(); }

  std::span<const T> data() const { return node_->value; }
  // In-place access for leaves (optimizer updates, test fixtures).
  std::span<T> mutable_data() { return node_->value; }
  const std::vector<T>& values() const { return node_->value; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->grad; }
  void zero_grad();

  T item() const;
  const char* op() const { return node_->op; }
  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& node_ptr() const { return node_; }

  // Value copy detached from any graph.
  Tensor detach(bool requires_grad = false) const;

 private:
  std::shared_ptr<Node<T>> node_;
};

template <typename T>
Tensor<T> tensor_new(const Shape& shape, const Fill& fill, bool requires_grad = false);

// Reverse sweep from a scalar loss. Leaf gradients accumulate; the graph's
// intermediate state is released afterwards, so a second call on the same
// loss throws StateError.
template <typename T>
void backward(const Tensor<T>& loss);

namespace detail {

void check_shape(const Shape& shape);

// Builds the result node of a differentiable op. When no input requires
// grad the result is a plain constant and `backward_fn` is dropped.
template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> value,
                      std::vector<Tensor<T>> inputs, typename Node<T>::BackwardFn backward_fn);

}  // namespace detail

}  // namespace dsea
