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

#include "sfm.hpp"

#include "ops.hpp"

namespace dsea {

std::vector<ParamSpec> sfm_param_specs(std::int64_t c) {
  if (c % kSfmReduction != 0 || c % 4 != 0) {
    throw ConfigError("sfm: width " + std::to_string(c) + " must be divisible by 4");
  }
  const std::int64_t red = c / kSfmReduction, quarter = c / 4;
  return {
      {"dw_weight", {c, 1, 3, 3}, InitKind::he_uniform, 0.0, 9},
      {"fc_in_weight", {c, c, 1, 1}, InitKind::he_uniform, 0.0, c},
      {"fc_in_bias", {c}, InitKind::zeros},
      {"fc_red_weight", {red, c}, InitKind::he_uniform, 0.0, c},
      {"fc_red_bias", {red}, InitKind::zeros},
      {"fc_exp_weight", {c, red}, InitKind::he_uniform, 0.0, red},
      {"fc_exp_bias", {c}, InitKind::zeros},
      {"conv1_weight", {quarter, c, 3, 3}, InitKind::he_uniform, 0.0, c * 9},
      {"conv1_bias", {quarter}, InitKind::zeros},
      {"ln1_gamma", {quarter}, InitKind::ones},
      {"ln1_beta", {quarter}, InitKind::zeros},
      {"conv2_weight", {1, quarter, 3, 3}, InitKind::he_uniform, 0.0, quarter * 9},
      {"conv2_bias", {1}, InitKind::zeros},
      {"ln2_gamma", {1}, InitKind::ones},
      {"ln2_beta", {1}, InitKind::zeros},
  };
}

template <typename T>
SfmParams<T> SfmParams<T>::from_store(const ParamStore<T>& s, const std::string& prefix,
                                      int dct_groups) {
  SfmParams p;
  p.dw_weight = s.at(prefix + "dw_weight");
  p.fc_in_weight = s.at(prefix + "fc_in_weight");
  p.fc_in_bias = s.at(prefix + "fc_in_bias");
  p.fc_red_weight = s.at(prefix + "fc_red_weight");
  p.fc_red_bias = s.at(prefix + "fc_red_bias");
  p.fc_exp_weight = s.at(prefix + "fc_exp_weight");
  p.fc_exp_bias = s.at(prefix + "fc_exp_bias");
  p.conv1_weight = s.at(prefix + "conv1_weight");
  p.conv1_bias = s.at(prefix + "conv1_bias");
  p.ln1_gamma = s.at(prefix + "ln1_gamma");
  p.ln1_beta = s.at(prefix + "ln1_beta");
  p.conv2_weight = s.at(prefix + "conv2_weight");
  p.conv2_bias = s.at(prefix + "conv2_bias");
  p.ln2_gamma = s.at(prefix + "ln2_gamma");
  p.ln2_beta = s.at(prefix + "ln2_beta");
  p.basis = DctBasisSelection::zigzag(dct_groups);
  return p;
}

template <typename T>
Tensor<T> grouped_dct_descriptor(const Tensor<T>& y, const DctBasisSelection& basis) {
  const std::int64_t c = y.dim(0);
  const auto groups = static_cast<std::int64_t>(basis.pairs.size());
  if (groups < 1 || c % groups != 0) {
    throw ConfigError("sfm: " + std::to_string(c) + " channels not divisible into " +
                      std::to_string(groups) + " DCT groups");
  }
  basis.validate(y.dim(1), y.dim(2));
  const std::int64_t per_group = c / groups;
  std::vector<std::pair<int, int>> freqs(static_cast<std::size_t>(c));
  for (std::int64_t ch = 0; ch < c; ++ch) freqs[ch] = basis.pairs[ch / per_group];
  return dct2_channel_coefficients(y, freqs);
}

template <typename T>
Tensor<T> frequency_excitation(const Tensor<T>& y, const SfmParams<T>& p) {
  const std::int64_t c = y.dim(0);
  auto refined = conv2d(y, p.dw_weight, Tensor<T>{}, {1, 1, static_cast<int>(c)});
  refined = conv2d(refined, p.fc_in_weight, p.fc_in_bias);
  auto descriptor = grouped_dct_descriptor(refined, p.basis);
  auto hidden = relu(linear(descriptor, p.fc_red_weight, p.fc_red_bias));
  return sigmoid(linear(hidden, p.fc_exp_weight, p.fc_exp_bias));
}

template <typename T>
Tensor<T> spatial_excitation(const Tensor<T>& y, const SfmParams<T>& p) {
  if (y.dim(1) < 2 || y.dim(2) < 2) throw ShapeError("sfm: spatial branch needs H,W >= 2");
  auto s = pool_windows(y, 2, 2);
  s = relu(layernorm(conv2d(s, p.conv1_weight, p.conv1_bias, {1, 1, 1}), p.ln1_gamma, p.ln1_beta));
  s = relu(layernorm(conv2d(s, p.conv2_weight, p.conv2_bias, {1, 1, 1}), p.ln2_gamma, p.ln2_beta));
  return sigmoid(upsample_nearest(s, y.dim(1), y.dim(2)));
}

template <typename T>
Tensor<T> sfm_fuse(const Tensor<T>& y, const Tensor<T>& tau_f, const Tensor<T>& tau_s) {
  return add(add(mul(y, tau_f), mul(y, tau_s)), y);
}

template <typename T>
Tensor<T> sfm_forward(const Tensor<T>& y, const SfmParams<T>& p) {
  if (y.rank() != 3) throw ShapeError("sfm: expected [C,H,W], got " + shape_str(y.shape()));
  return sfm_fuse(y, frequency_excitation(y, p), spatial_excitation(y, p));
}

#define DSEA_INSTANTIATE(T)                                                                 \
  template struct SfmParams<T>;                                                             \
  template Tensor<T> grouped_dct_descriptor(const Tensor<T>&, const DctBasisSelection&);    \
  template Tensor<T> frequency_excitation(const Tensor<T>&, const SfmParams<T>&);           \
  template Tensor<T> spatial_excitation(const Tensor<T>&, const SfmParams<T>&);             \
  template Tensor<T> sfm_fuse(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);        \
  template Tensor<T> sfm_forward(const Tensor<T>&, const SfmParams<T>&);

DSEA_INSTANTIATE(float)
DSEA_INSTANTIATE(double)

#undef DSEA_INSTANTIATE

}  // namespace dsea
