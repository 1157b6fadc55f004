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

#include "tensor.hpp"

namespace dsea {

// Differentiable tensor operations. Image-like tensors are channel-first
// [C,H,W]; a "scalar" tensor has shape [1].

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> transpose2d(const Tensor<T>& a);

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, const Shape& shape);

struct Conv2dOptions {
  int stride = 1;
  int pad = 0;
  int groups = 1;
};

// Cross-correlation with zero padding. `b` may be an undefined Tensor for a
// bias-free convolution. Output extent is floor((H + 2*pad - kh) / stride) + 1.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 Conv2dOptions opts = {});

// Non-overlapping average pooling with window (wh, ww). Output extent is
// max(1, H / wh); trailing rows and columns fold into the last window.
template <typename T>
Tensor<T> pool_windows(const Tensor<T>& x, std::int64_t wh, std::int64_t ww);

// Broadcasts each pooled cell back over the input cells of its window.
template <typename T>
Tensor<T> unpool_windows(const Tensor<T>& pooled, std::int64_t height, std::int64_t width,
                         std::int64_t wh, std::int64_t ww);

template <typename T>
struct PoolResult {
  Tensor<T> pooled;
  Tensor<T> low;  // pooled, broadcast back to the input extent
};

// DC extraction: window = max(1, floor(ratio * extent)). ratio 1 gives the
// global per-channel mean.
template <typename T>
PoolResult<T> avg_pool_ratio(const Tensor<T>& x, double ratio);

std::int64_t pool_window_for_ratio(std::int64_t extent, double ratio);

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, std::int64_t out_h, std::int64_t out_w);

// Normalizes over all C*H*W elements, then applies a per-channel affine.
template <typename T>
Tensor<T> layernorm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                    double eps = 1e-5);

enum class Activation { relu, sigmoid, softmax_lastdim };

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Activation kind);

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  return activation(x, Activation::relu);
}
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  return activation(x, Activation::sigmoid);
}
template <typename T>
Tensor<T> softmax_lastdim(const Tensor<T>& x) {
  return activation(x, Activation::softmax_lastdim);
}

enum class Elementwise { add, mul, sub };

// Right-aligned broadcasting over singleton dimensions, numpy style.
template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, const Tensor<T>& b, Elementwise kind);

template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, T b, Elementwise kind);

Shape broadcast_shapes(const Shape& a, const Shape& b);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(a, b, Elementwise::add);
}
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(a, b, Elementwise::sub);
}
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(a, b, Elementwise::mul);
}
template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T s) {
  return elementwise(a, s, Elementwise::add);
}
template <typename T>
Tensor<T> mul_scalar(const Tensor<T>& a, T s) {
  return elementwise(a, s, Elementwise::mul);
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a);

template <typename T>
Tensor<T> mean(const Tensor<T>& a);

// |x| with subgradient 0 at x == 0.
template <typename T>
Tensor<T> abs(const Tensor<T>& a);

// sqrt(re^2 + im^2 + eps^2), elementwise.
template <typename T>
Tensor<T> complex_modulus(const Tensor<T>& re, const Tensor<T>& im, double eps);

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

// Slice `index` along dimension 0, dropping that dimension.
template <typename T>
Tensor<T> select(const Tensor<T>& a, std::int64_t index);

// Fully-connected layer on a vector: w [out,in] times x (any shape with `in`
// elements), plus b [out]. Returns shape [out,1,1].
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

}  // namespace dsea
