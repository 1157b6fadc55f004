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

#include <string>
#include <vector>

#include "params.hpp"
#include "tensor.hpp"

namespace dsea {

// Dual-frequency enhanced self-attention block.
//
// Channel self-attention over layer-normalized features, refined by two
// per-channel factors computed from a gated low/high frequency split of the
// input: the low factor is added (scaled by alpha), the high factor
// multiplies (scaled by beta). The block is wrapped in a residual.
template <typename T>
struct DfesaParams {
  Tensor<T> q_weight, q_bias, k_weight, k_bias, v_weight, v_bias;  // 1x1 convs C->C
  Tensor<T> ln_gamma, ln_beta;
  // Frequency branch. Undefined when the block runs as plain attention.
  Tensor<T> freq_gate;
  Tensor<T> dw_low, dw_high;  // depthwise 3x3, [C,1,3,3]
  Tensor<T> fc_low_weight, fc_low_bias, fc_high_weight, fc_high_bias;
  Tensor<T> alpha, beta;  // shape [1]

  bool plain_attention() const { return !freq_gate.defined(); }

  static DfesaParams from_store(const ParamStore<T>& store, const std::string& prefix);
};

// Parameter layout for width `channels`. Biases of the factor FCs start at 1,
// alpha at 0 and beta at 1 so the block starts near plain attention.
std::vector<ParamSpec> dfesa_param_specs(std::int64_t channels, bool plain_attention);

template <typename T>
struct Qkv {
  Tensor<T> q, k, v;  // each [C, H*W]
};

template <typename T>
Qkv<T> project_qkv(const Tensor<T>& f, const DfesaParams<T>& p);

// softmax(q k^T / sqrt(H*W)) v, reshaped to [C,H,W].
template <typename T>
Tensor<T> channel_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                            std::int64_t height, std::int64_t width);

// The C x C attention map alone; rows are softmax-normalized.
template <typename T>
Tensor<T> attention_map(const Tensor<T>& q, const Tensor<T>& k);

template <typename T>
struct FrequencyFactors {
  Tensor<T> low;   // [C,1,1], >= 0
  Tensor<T> high;  // [C,1,1], >= 0
};

template <typename T>
FrequencyFactors<T> frequency_factors(const Tensor<T>& f, const DfesaParams<T>& p, double ratio);

// (x_hat + alpha * f_low) * (beta * f_high) + residual.
template <typename T>
Tensor<T> dfesa_combine(const Tensor<T>& x_hat, const FrequencyFactors<T>& factors,
                        const Tensor<T>& alpha, const Tensor<T>& beta, const Tensor<T>& residual);

template <typename T>
Tensor<T> dfesa_forward(const Tensor<T>& f, const DfesaParams<T>& p, double ratio);

}  // namespace dsea
