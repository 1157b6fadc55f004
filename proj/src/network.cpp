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

#include "network.hpp"

#include <regex>

#include "dfesa.hpp"
#include "ops.hpp"
#include "sfm.hpp"

namespace dsea {

void ModelConfig::validate() const {
  if (levels != kLevels) throw ConfigError("levels must be 3");
  if (base_width < 1) throw ConfigError("base_width must be positive");
  if (blocks_per_level < 1) throw ConfigError("blocks_per_level must be >= 1");
  if (dct_groups < 1) throw ConfigError("dct_groups must be >= 1");
  if (base_width % dct_groups != 0) throw ConfigError("base_width must be divisible by dct_groups");
  if (base_width % 4 != 0) throw ConfigError("base_width must be divisible by 4");
  if (!(pooling_ratio > 0.0 && pooling_ratio <= 1.0)) {
    throw ConfigError("pooling_ratio must be in (0,1]");
  }
}

std::vector<ParamSpec> resblock_param_specs(std::int64_t c) {
  return {
      {"conv_a_weight", {c, c, 3, 3}, InitKind::he_uniform, 0.0, c * 9},
      {"conv_a_bias", {c}, InitKind::zeros},
      {"conv_b_weight", {c, c, 3, 3}, InitKind::he_uniform, 0.0, c * 9},
      {"conv_b_bias", {c}, InitKind::zeros},
      {"dc_gate", {c}, InitKind::zeros},
  };
}

template <typename T>
ResBlockParams<T> ResBlockParams<T>::from_store(const ParamStore<T>& s, const std::string& prefix) {
  return {s.at(prefix + "conv_a_weight"), s.at(prefix + "conv_a_bias"),
          s.at(prefix + "conv_b_weight"), s.at(prefix + "conv_b_bias"), s.at(prefix + "dc_gate")};
}

template <typename T>
Tensor<T> resblock_forward(const Tensor<T>& x, const ResBlockParams<T>& p, double ratio) {
  if (x.rank() != 3) throw ShapeError("resblock: expected [C,H,W], got " + shape_str(x.shape()));
  const std::int64_t c = x.dim(0);
  auto dc = avg_pool_ratio(x, ratio).low;
  auto gated = mul(dc, sigmoid(reshape(p.dc_gate, {c, 1, 1})));
  auto h = conv2d(add(x, gated), p.conv_a_weight, p.conv_a_bias, {1, 1, 1});
  h = conv2d(relu(h), p.conv_b_weight, p.conv_b_bias, {1, 1, 1});
  return add(x, h);
}

template <typename T>
Tensor<T> area_downsample2(const Tensor<T>& x) {
  return pool_windows(x, 2, 2);
}

namespace {

std::string level_prefix(int level) { return "level" + std::to_string(level) + "."; }

std::string block_prefix(int level, int block) {
  return level_prefix(level) + "block" + std::to_string(block) + ".";
}

std::vector<ParamSpec> conv_specs(std::int64_t cin, std::int64_t cout, std::int64_t k,
                                  bool zero_init) {
  const Shape w{cout, cin, k, k};
  if (zero_init) return {{"weight", w, InitKind::zeros}, {"bias", {cout}, InitKind::zeros}};
  return {{"weight", w, InitKind::he_uniform, 0.0, cin * k * k}, {"bias", {cout}, InitKind::zeros}};
}

std::int64_t width_at(const ModelConfig& cfg, int level) {
  return static_cast<std::int64_t>(cfg.base_width) << level;
}

template <typename T>
Tensor<T> conv_named(const ParamStore<T>& s, const std::string& prefix, const Tensor<T>& x,
                     Conv2dOptions opts) {
  return conv2d(x, s.at(prefix + "weight"), s.at(prefix + "bias"), opts);
}

template <typename T>
Tensor<T> unit_forward(const ParamStore<T>& s, const ModelConfig& cfg, int level, int block,
                       Tensor<T> h) {
  const std::string prefix = block_prefix(level, block);
  h = resblock_forward(h, ResBlockParams<T>::from_store(s, prefix + "resblock."),
                       cfg.pooling_ratio);
  if (cfg.enable_dfesa) {
    h = dfesa_forward(h, DfesaParams<T>::from_store(s, prefix + "dfesa."), cfg.pooling_ratio);
  }
  if (cfg.enable_sfm) {
    h = sfm_forward(h, SfmParams<T>::from_store(s, prefix + "sfm.", cfg.dct_groups));
  }
  return h;
}

}  // namespace

template <typename T>
ParamStore<T> build_model(const ModelConfig& cfg) {
  cfg.validate();
  ParamStore<T> store;
  const int blocks = cfg.blocks_per_level;
  auto add_unit = [&](int level, int block) {
    const std::int64_t c = width_at(cfg, level);
    const std::string prefix = block_prefix(level, block);
    instantiate_params(store, prefix + "resblock.", resblock_param_specs(c), cfg.seed);
    if (cfg.enable_dfesa) {
      instantiate_params(store, prefix + "dfesa.", dfesa_param_specs(c, cfg.plain_attention),
                         cfg.seed);
    }
    if (cfg.enable_sfm) instantiate_params(store, prefix + "sfm.", sfm_param_specs(c), cfg.seed);
  };

  instantiate_params(store, level_prefix(0) + "stem.", conv_specs(3, width_at(cfg, 0), 3, false),
                     cfg.seed);
  for (int level = 0; level < kLevels; ++level) {
    const std::int64_t c = width_at(cfg, level);
    // Encoder units are block0..B-1; decoder units (levels 0 and 1) follow.
    const int units = level == kLevels - 1 ? blocks : 2 * blocks;
    for (int j = 0; j < units; ++j) add_unit(level, j);
    if (level + 1 < kLevels) {
      instantiate_params(store, level_prefix(level) + "down.", conv_specs(c, 2 * c, 3, false),
                         cfg.seed);
      instantiate_params(store, level_prefix(level) + "up.", conv_specs(2 * c, c, 3, false),
                         cfg.seed);
      instantiate_params(store, level_prefix(level) + "fuse.", conv_specs(2 * c, c, 1, false),
                         cfg.seed);
    }
    instantiate_params(store, level_prefix(level) + "head.", conv_specs(c, 3, 3, true), cfg.seed);
  }
  return store;
}

template <typename T>
MultiScaleOutput<T> model_forward(const ParamStore<T>& s, const ModelConfig& cfg,
                                  const Tensor<T>& img) {
  cfg.validate();
  if (img.rank() != 3 || img.dim(0) != 3) {
    throw ShapeError("model_forward: expected [3,H,W], got " + shape_str(img.shape()));
  }
  if (img.dim(1) % 4 != 0 || img.dim(2) % 4 != 0) {
    throw ShapeError("model_forward: H and W must be divisible by 4, got " +
                     shape_str(img.shape()));
  }
  const int blocks = cfg.blocks_per_level;
  std::array<Tensor<T>, kLevels> bases;
  bases[0] = img;
  for (int l = 1; l < kLevels; ++l) bases[l] = area_downsample2(bases[l - 1]);

  std::array<Tensor<T>, kLevels> skips;
  Tensor<T> h = conv_named(s, level_prefix(0) + "stem.", img, {1, 1, 1});
  for (int level = 0; level < kLevels; ++level) {
    for (int j = 0; j < blocks; ++j) h = unit_forward(s, cfg, level, j, h);
    skips[level] = h;
    if (level + 1 < kLevels) h = conv_named(s, level_prefix(level) + "down.", h, {2, 1, 1});
  }

  MultiScaleOutput<T> out;
  for (int level = kLevels - 1; level >= 0; --level) {
    if (level < kLevels - 1) {
      h = upsample_nearest(h, skips[level].dim(1), skips[level].dim(2));
      h = conv_named(s, level_prefix(level) + "up.", h, {1, 1, 1});
      h = conv_named(s, level_prefix(level) + "fuse.", concat_channels(h, skips[level]), {});
      for (int j = blocks; j < 2 * blocks; ++j) h = unit_forward(s, cfg, level, j, h);
    }
    auto residual = conv_named(s, level_prefix(level) + "head.", h, {1, 1, 1});
    out.preds[level] = add(bases[level], residual);
  }
  return out;
}

bool is_canonical_name(const std::string& name) {
  static const std::regex grammar(
      R"(level[0-2]\.((block[0-9]+\.(resblock|dfesa|sfm)\.[a-z0-9_]+)|((stem|down|up|fuse|head)\.(weight|bias))))");
  return std::regex_match(name, grammar);
}

#define DSEA_INSTANTIATE(T)                                                                   \
  template struct ResBlockParams<T>;                                                          \
  template Tensor<T> resblock_forward(const Tensor<T>&, const ResBlockParams<T>&, double);    \
  template Tensor<T> area_downsample2(const Tensor<T>&);                                      \
  template ParamStore<T> build_model<T>(const ModelConfig&);                                  \
  template MultiScaleOutput<T> model_forward(const ParamStore<T>&, const ModelConfig&,        \
                                             const Tensor<T>&);

DSEA_INSTANTIATE(float)
DSEA_INSTANTIATE(double)

#undef DSEA_INSTANTIATE

}  // namespace dsea
