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

#include "dataset.hpp"
#include "losses.hpp"
#include "network.hpp"

namespace dsea {

// Edge-pads to a multiple of 4, runs the model, crops back and clamps to [0,1].
Tensor<float> enhance_image(const ParamStore<float>& params, const ModelConfig& cfg,
                            const Tensor<float>& img);

// Per-image PSNR/SSIM of the enhanced input against its target, in file-name order.
MetricReport evaluate(const ParamStore<float>& params, const ModelConfig& cfg, const Dataset& data);

}  // namespace dsea
