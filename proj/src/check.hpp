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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "params.hpp"
#include "tensor.hpp"

namespace dsea {

struct GradcheckResult {
  double max_rel_error = 0.0;  // worst per-tensor relative error
  std::string worst;           // name of the tensor that produced it
  std::int64_t evaluations = 0;
};

using Named = std::pair<std::string, Tensor<double>>;

// Compares reverse-mode gradients of the scalar f() against central finite
// differences with step h, perturbing each element of each `wrt` tensor in
// place. Per-tensor error is ||analytic - numeric|| / (||analytic|| + ||numeric||),
// with the denominator floored at 1e-3 so exactly-zero gradients do not amplify FD roundoff.
GradcheckResult gradcheck(const std::function<Tensor<double>()>& f, const std::vector<Named>& wrt,
                          double h = 1e-4);

// sum(x * R) for a fixed uniform(-1,1) tensor R drawn from `seed`.
Tensor<double> random_projection(const Tensor<double>& x, std::uint64_t seed);

// Every tensor of a store as a gradcheck target, values jittered by
// uniform(-spread, spread) so no parameter sits at a degenerate init.
std::vector<Named> jittered_targets(ParamStore<double>& store, std::uint64_t seed, double spread);

// Direct O(N^4) DFT of each [H,W] plane of a real [C,H,W] tensor.
std::vector<std::complex<double>> naive_dft2(std::span<const double> x, std::int64_t channels,
                                             std::int64_t height, std::int64_t width);

// Orthonormal 2-D DCT-II coefficient (u, v) of a row-major [H,W] plane, by
// double loop over the cosine definition.
double naive_dct2(std::span<const double> x, std::int64_t height, std::int64_t width, int u, int v);

}  // namespace dsea
