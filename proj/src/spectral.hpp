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

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "tensor.hpp"

namespace dsea {

// In-place unnormalized DFT of any length: iterative radix-2 for powers of
// two, Bluestein's chirp-z otherwise. `inverse` flips the exponent sign and
// does not scale.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse = false);

// 2-D transform of `channels` row-major planes of size height x width.
void fft2_planes(std::vector<std::complex<double>>& data, std::int64_t channels,
                 std::int64_t height, std::int64_t width, bool inverse = false);

template <typename T>
struct ComplexPlane {
  Tensor<T> re;
  Tensor<T> im;
};

// Unnormalized forward 2-D DFT per channel of x [C,H,W].
template <typename T>
ComplexPlane<T> fft2(const Tensor<T>& x);

// Frequency indices (u, v) used by the DCT channel descriptor, one per
// channel group.
struct DctBasisSelection {
  std::vector<std::pair<int, int>> pairs;

  // First `count` entries of the JPEG zigzag scan, lowest frequencies first.
  static DctBasisSelection zigzag(int count);
  void validate(std::int64_t height, std::int64_t width) const;
};

// Orthonormal DCT-II basis weight alpha(k) * cos(pi * (2i + 1) * k / 2n).
double dct_basis(std::int64_t n, std::int64_t k, std::int64_t i);

// One orthonormal DCT-II coefficient per channel of x [C,H,W]; channel c uses
// freqs[c]. Returns [C,1,1].
template <typename T>
Tensor<T> dct2_channel_coefficients(const Tensor<T>& x,
                                    const std::vector<std::pair<int, int>>& freqs);

// Single coefficient (u, v) of a 2-D map x [h,w]. Returns shape [1].
template <typename T>
Tensor<T> dct2_coefficient(const Tensor<T>& x, int u, int v);

template <typename T>
struct FrequencyPair {
  Tensor<T> low;
  Tensor<T> high;
};

// Gated DC split: low = sigmoid(gate) * avg_pool_ratio(f, ratio).low,
// high = f - low. gate has one entry per channel.
template <typename T>
FrequencyPair<T> decompose_frequencies(const Tensor<T>& f, const Tensor<T>& gate, double ratio);

}  // namespace dsea
