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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "params.hpp"
#include "tensor.hpp"

namespace dsea {

inline constexpr int kLevels = 3;

struct ModelConfig {
  int base_width = 16;
  int levels = kLevels;
  int blocks_per_level = 1;
  double pooling_ratio = 1.0;
  int dct_groups = 8;
  bool enable_dfesa = true;
  bool enable_sfm = true;
  // DFESA without its frequency branch: attention plus residual only.
  bool plain_attention = false;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename T>
struct ResBlockParams {
  Tensor<T> conv_a_weight, conv_a_bias, conv_b_weight, conv_b_bias;
  Tensor<T> dc_gate;  // [C]

  static ResBlockParams from_store(const ParamStore<T>& store, const std::string& prefix);
};

std::vector<ParamSpec> resblock_param_specs(std::int64_t channels);

// x + conv_b(relu(conv_a(x + sigmoid(dc_gate) * DC(x)))), where DC(x) is the
// ratio-pooled low-pass broadcast back to full resolution.
template <typename T>
Tensor<T> resblock_forward(const Tensor<T>& x, const ResBlockParams<T>& p, double ratio);

// Predictions at full, half and quarter resolution (finest first).
template <typename T>
struct MultiScaleOutput {
  std::array<Tensor<T>, kLevels> preds;
};

// Allocates every parameter of the U-Net under canonical names (see
// is_canonical_name). Output heads start at zero.
template <typename T>
ParamStore<T> build_model(const ModelConfig& cfg);

template <typename T>
MultiScaleOutput<T> model_forward(const ParamStore<T>& params, const ModelConfig& cfg,
                                  const Tensor<T>& img);

// level{i}.block{j}.{resblock|dfesa|sfm}.{param} or
// level{i}.{stem|down|up|fuse|head}.{weight|bias}
bool is_canonical_name(const std::string& name);

// 2x2 area average; odd trailing rows/columns fold into the last window.
template <typename T>
Tensor<T> area_downsample2(const Tensor<T>& x);

}  // namespace dsea
