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

#include "check.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ops.hpp"

namespace dsea {

GradcheckResult gradcheck(const std::function<Tensor<double>()>& f, const std::vector<Named>& wrt,
                          double h) {
  for (const auto& [name, t] : wrt) {
    Tensor<double> handle = t;
    handle.zero_grad();
  }
  const Tensor<double> loss = f();
  backward(loss);
  GradcheckResult result;
  for (const auto& [name, t] : wrt) {
    Tensor<double> handle = t;
    std::vector<double> analytic(t.numel(), 0.0);
    if (t.has_grad()) std::copy(t.grad().begin(), t.grad().end(), analytic.begin());
    auto values = handle.mutable_data();
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = f().item();
      values[i] = saved - h;
      const double down = f().item();
      values[i] = saved;
      result.evaluations += 2;
      const double numeric = (up - down) / (2.0 * h);
      diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
      a2 += analytic[i] * analytic[i];
      n2 += numeric * numeric;
    }
    const double rel = std::sqrt(diff2) / std::max(std::sqrt(a2) + std::sqrt(n2), 1e-3);
    if (rel >= result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst = name;
    }
    handle.zero_grad();
  }
  return result;
}

Tensor<double> random_projection(const Tensor<double>& x, std::uint64_t seed) {
  const auto r = Tensor<double>::uniform(x.shape(), -1.0, 1.0, seed);
  return sum(mul(x, r));
}

std::vector<Named> jittered_targets(ParamStore<double>& store, std::uint64_t seed, double spread) {
  std::vector<Named> out;
  std::uint64_t k = 0;
  for (const auto& [name, t] : store) {
    Tensor<double> handle = t;
    const auto noise = Tensor<double>::uniform(t.shape(), -spread, spread, seed * 1000003ULL + ++k);
    auto v = handle.mutable_data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += noise.data()[i];
    out.emplace_back(name, handle);
  }
  return out;
}

std::vector<std::complex<double>> naive_dft2(std::span<const double> x, std::int64_t channels,
                                             std::int64_t height, std::int64_t width) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(channels * height * width));
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::int64_t c = 0; c < channels; ++c)
    for (std::int64_t u = 0; u < height; ++u)
      for (std::int64_t v = 0; v < width; ++v) {
        std::complex<double> acc = 0.0;
        for (std::int64_t y = 0; y < height; ++y)
          for (std::int64_t xx = 0; xx < width; ++xx) {
            const double phase = -two_pi * (static_cast<double>(u * y) / static_cast<double>(height) +
                                            static_cast<double>(v * xx) / static_cast<double>(width));
            acc += x[static_cast<std::size_t>((c * height + y) * width + xx)] *
                   std::complex<double>(std::cos(phase), std::sin(phase));
          }
        out[static_cast<std::size_t>((c * height + u) * width + v)] = acc;
      }
  return out;
}

double naive_dct2(std::span<const double> x, std::int64_t height, std::int64_t width, int u, int v) {
  const double pi = std::numbers::pi;
  double acc = 0.0;
  for (std::int64_t i = 0; i < height; ++i)
    for (std::int64_t j = 0; j < width; ++j)
      acc += x[static_cast<std::size_t>(i * width + j)] *
             std::cos(pi * (2.0 * static_cast<double>(i) + 1.0) * u / (2.0 * static_cast<double>(height))) *
             std::cos(pi * (2.0 * static_cast<double>(j) + 1.0) * v / (2.0 * static_cast<double>(width)));
  const double au = u == 0 ? std::sqrt(1.0 / static_cast<double>(height)) : std::sqrt(2.0 / static_cast<double>(height));
  const double av = v == 0 ? std::sqrt(1.0 / static_cast<double>(width)) : std::sqrt(2.0 / static_cast<double>(width));
  return au * av * acc;
}

}  // namespace dsea
