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
#include "spectral.hpp"
#include "tensor.hpp"

namespace dsea {

// Spatial and frequency modulator: a DCT channel-attention gate and a
// half-resolution spatial gate, both applied to the input and summed with a
// residual.
template <typename T>
struct SfmParams {
  Tensor<T> dw_weight;                     // depthwise 3x3 [C,1,3,3]
  Tensor<T> fc_in_weight, fc_in_bias;      // per-pixel FC as 1x1 conv C->C
  Tensor<T> fc_red_weight, fc_red_bias;    // C -> C/r
  Tensor<T> fc_exp_weight, fc_exp_bias;    // C/r -> C
  Tensor<T> conv1_weight, conv1_bias;      // 3x3 C -> C/4
  Tensor<T> ln1_gamma, ln1_beta;
  Tensor<T> conv2_weight, conv2_bias;      // 3x3 C/4 -> 1
  Tensor<T> ln2_gamma, ln2_beta;
  DctBasisSelection basis;

  static SfmParams from_store(const ParamStore<T>& store, const std::string& prefix,
                              int dct_groups);
};

inline constexpr int kSfmReduction = 4;

std::vector<ParamSpec> sfm_param_specs(std::int64_t channels);

// tau_f in (0,1)^C, shape [C,1,1].
template <typename T>
Tensor<T> frequency_excitation(const Tensor<T>& y, const SfmParams<T>& p);

// Per-channel DCT descriptor: channel c of group g is reduced to its
// coefficient at basis.pairs[g]. Returns [C,1,1].
template <typename T>
Tensor<T> grouped_dct_descriptor(const Tensor<T>& y, const DctBasisSelection& basis);

// tau_s in (0,1), shape [1,H,W].
template <typename T>
Tensor<T> spatial_excitation(const Tensor<T>& y, const SfmParams<T>& p);

// tau_f * y + tau_s * y + y.
template <typename T>
Tensor<T> sfm_fuse(const Tensor<T>& y, const Tensor<T>& tau_f, const Tensor<T>& tau_s);

template <typename T>
Tensor<T> sfm_forward(const Tensor<T>& y, const SfmParams<T>& p);

}  // namespace dsea
