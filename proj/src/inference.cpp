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

#include "inference.hpp"

#include <algorithm>

#include "spectral.hpp"

namespace dsea {

namespace {

std::int64_t round_up4(std::int64_t v) { return (v + 3) / 4 * 4; }

// Smallest extent whose coarsest level still holds every selected DCT
// frequency. Tiny inputs are edge-padded up to it.
std::pair<std::int64_t, std::int64_t> min_extent(const ModelConfig& cfg) {
  if (!cfg.enable_sfm) return {4, 4};
  std::int64_t u = 0, v = 0;
  for (const auto& [a, b] : DctBasisSelection::zigzag(cfg.dct_groups).pairs) {
    u = std::max<std::int64_t>(u, a);
    v = std::max<std::int64_t>(v, b);
  }
  return {4 * (u + 1), 4 * (v + 1)};
}

}  // namespace

Tensor<float> enhance_image(const ParamStore<float>& params, const ModelConfig& cfg,
                            const Tensor<float>& img) {
  if (img.rank() != 3 || img.dim(0) != 3) {
    throw ShapeError("enhance_image: expected [3,H,W], got " + shape_str(img.shape()));
  }
  const std::int64_t h = img.dim(1), w = img.dim(2);
  const auto [min_h, min_w] = min_extent(cfg);
  const Tensor<float> padded =
      pad_edge(img, std::max(round_up4(h), min_h), std::max(round_up4(w), min_w));
  const auto out = model_forward(params, cfg, padded);
  Tensor<float> pred = crop(out.preds[0].detach(), 0, 0, h, w);
  for (float& v : pred.mutable_data()) v = std::clamp(v, 0.0f, 1.0f);
  return pred;
}

MetricReport evaluate(const ParamStore<float>& params, const ModelConfig& cfg, const Dataset& data) {
  MetricReport report;
  for (const auto& pair : data.pairs()) {
    const Tensor<float> pred = enhance_image(params, cfg, pair.input);
    report.add(pair.id, psnr(pred, pair.target), ssim(pred, pair.target));
  }
  return report;
}

}  // namespace dsea
