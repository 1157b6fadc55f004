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

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "png.hpp"

namespace dsea {

ImagePair synthesize_pair(std::int64_t height, std::int64_t width, std::uint64_t seed) {
  if (height < 1 || width < 1) throw ParameterError("synthetic image extent must be positive");
  Rng rng(mix_seed(seed, 0x5157));
  std::uniform_real_distribution<double> u(0.0, 1.0);

  struct Disc {
    double cy, cx, r, color[3];
  };
  double base[3][3];  // per channel: offset, y slope, x slope
  for (auto& b : base) b[0] = 0.2 + 0.5 * u(rng), b[1] = 0.4 * (u(rng) - 0.5), b[2] = 0.4 * (u(rng) - 0.5);
  std::vector<Disc> discs(3 + rng() % 3);
  for (auto& d : discs) {
    d.cy = u(rng), d.cx = u(rng), d.r = 0.08 + 0.2 * u(rng);
    for (double& c : d.color) c = u(rng);
  }
  const double stripe_freq = 2.0 + 6.0 * u(rng);
  const double stripe_angle = std::numbers::pi * u(rng);
  const double stripe_amp = 0.05 + 0.1 * u(rng);

  const double transmission[3] = {0.45 + 0.15 * u(rng), 0.75 + 0.1 * u(rng), 0.8 + 0.1 * u(rng)};
  const double veil[3] = {0.05 + 0.1 * u(rng), 0.35 + 0.2 * u(rng), 0.45 + 0.2 * u(rng)};

  const std::int64_t plane = height * width;
  std::vector<float> target(static_cast<std::size_t>(3 * plane)), input(target.size());
  for (std::int64_t y = 0; y < height; ++y) {
    for (std::int64_t x = 0; x < width; ++x) {
      const double fy = (static_cast<double>(y) + 0.5) / static_cast<double>(height);
      const double fx = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
      const double stripe =
          stripe_amp * std::sin(2.0 * std::numbers::pi * stripe_freq *
                                (fx * std::cos(stripe_angle) + fy * std::sin(stripe_angle)));
      const double depth = 0.6 + 0.4 * fy;  // farther toward the bottom
      for (int c = 0; c < 3; ++c) {
        double v = base[c][0] + base[c][1] * (fy - 0.5) + base[c][2] * (fx - 0.5) + stripe;
        for (const auto& d : discs) {
          const double dist = std::hypot(fy - d.cy, fx - d.cx) / d.r;
          const double wgt = 1.0 / (1.0 + std::exp(12.0 * (dist - 1.0)));
          v = (1.0 - wgt) * v + wgt * d.color[c];
        }
        v = std::clamp(v, 0.0, 1.0);
        const double t = std::pow(transmission[c], depth);
        const double degraded = v * t + veil[c] * (1.0 - t);
        const std::size_t idx = static_cast<std::size_t>(c * plane + y * width + x);
        // Round through 8 bits so the pair survives a PNG round trip unchanged.
        target[idx] = static_cast<float>(quantize_unit(v)) / 255.0f;
        input[idx] = static_cast<float>(quantize_unit(degraded)) / 255.0f;
      }
    }
  }
  return {Tensor<float>::from_values({3, height, width}, std::move(input)),
          Tensor<float>::from_values({3, height, width}, std::move(target)), "synthetic"};
}

void write_synthetic_dataset(const std::filesystem::path& root, int count, std::int64_t height,
                             std::int64_t width, std::uint64_t seed) {
  if (count < 1) throw ParameterError("synthetic dataset needs at least one pair");
  std::filesystem::create_directories(root / "input");
  std::filesystem::create_directories(root / "target");
  for (int i = 0; i < count; ++i) {
    const ImagePair pair = synthesize_pair(height, width, mix_seed(seed, static_cast<std::uint64_t>(i)));
    char name[32];
    std::snprintf(name, sizeof name, "%04d.png", i);
    write_png(root / "input" / name, pair.input);
    write_png(root / "target" / name, pair.target);
  }
}

}  // namespace dsea
