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
#include <string>
#include <vector>

#include "network.hpp"
#include "tensor.hpp"

namespace dsea {

struct LossWeights {
  double lambda1 = 1.0;  // spatial L1
  double lambda2 = 0.1;  // spectral L1

  void validate() const;
};

inline constexpr double kFftLossEps = 1e-12;

// Mean absolute error.
template <typename T>
Tensor<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& gt);

// Mean over channels and frequency bins of |FFT(pred) - FFT(gt)|, with the
// modulus softened by kFftLossEps so it stays differentiable at zero.
template <typename T>
Tensor<T> fft_loss(const Tensor<T>& pred, const Tensor<T>& gt);

// Sum over the three scales of lambda1 * l1 + lambda2 * fft.
template <typename T>
Tensor<T> total_loss(const MultiScaleOutput<T>& out, const std::array<Tensor<T>, kLevels>& gt,
                     const LossWeights& w);

inline constexpr double kPsnrCap = 99.0;

// 10 log10(1 / MSE) on inputs clamped to [0,1]; +inf when MSE is zero.
template <typename T>
double psnr(const Tensor<T>& pred, const Tensor<T>& gt);

// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
// C2 = 0.03^2, valid windowing, averaged over channels.
template <typename T>
double ssim(const Tensor<T>& pred, const Tensor<T>& gt);

struct MetricRow {
  std::string name;
  double psnr_db = 0.0;  // capped at kPsnrCap
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;

  void add(std::string name, double psnr_db, double ssim);
  MetricRow mean() const;
  // Aligned human-readable table.
  std::string to_table() const;
  // One `name psnr ssim` line per image, then a MEAN line.
  std::string to_lines() const;
};

}  // namespace dsea
