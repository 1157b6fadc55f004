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

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "losses.hpp"
#include "ops.hpp"

using namespace dsea;
using T64 = Tensor<double>;

TEST_CASE("l1_loss") {
  const auto g = T64::uniform({3, 4, 4}, 0, 1, 1);
  CHECK(l1_loss(g, g).item() == 0.0);
  CHECK(l1_loss(add_scalar(g, 0.5), g).item() == doctest::Approx(0.5));
  const auto p = T64::uniform({3, 4, 4}, 0, 1, 2);
  double ref = 0;
  for (std::size_t i = 0; i < p.numel(); ++i) ref += std::abs(p.data()[i] - g.data()[i]);
  CHECK(std::abs(l1_loss(p, g).item() - ref / p.numel()) < 1e-7);
  CHECK_THROWS_AS(l1_loss(p, T64::zeros({3, 4, 5})), ShapeError);
}

TEST_CASE("fft_loss") {
  const auto g = T64::uniform({3, 6, 6}, 0, 1, 3);
  CHECK(fft_loss(g, g).item() <= kFftLossEps * 108);

  auto impulse = g.detach();
  impulse.mutable_data()[40] += 0.2;
  CHECK(fft_loss(impulse, g).item() == doctest::Approx(0.2 * 36 / 108.0).epsilon(1e-9));
  auto impulse2 = g.detach();
  impulse2.mutable_data()[40] += 0.4;
  CHECK(fft_loss(impulse2, g).item() == doctest::Approx(2 * fft_loss(impulse, g).item()).epsilon(1e-9));
}

TEST_CASE("total_loss") {
  std::array<T64, kLevels> gt;
  MultiScaleOutput<double> out;
  for (int s = 0; s < kLevels; ++s) {
    gt[s] = T64::uniform({3, 8 >> s, 8 >> s}, 0, 1, s);
    out.preds[s] = gt[s];
  }
  CHECK(total_loss(out, gt, {}).item() < 1e-9);

  for (int s = 0; s < kLevels; ++s) out.preds[s] = T64::uniform(gt[s].shape(), 0, 1, 10 + s);
  double l1 = 0, both = 0;
  for (int s = 0; s < kLevels; ++s) {
    l1 += l1_loss(out.preds[s], gt[s]).item();
    both += 1.0 * l1_loss(out.preds[s], gt[s]).item() + 0.1 * fft_loss(out.preds[s], gt[s]).item();
  }
  CHECK(total_loss(out, gt, {1.0, 0.0}).item() == doctest::Approx(l1).epsilon(1e-12));
  CHECK(total_loss(out, gt, {1.0, 0.1}).item() == doctest::Approx(both).epsilon(1e-12));
  CHECK_THROWS_AS(total_loss(out, gt, {-1.0, 0.1}), ConfigError);
}

TEST_CASE("psnr closed forms") {
  const Shape s{3, 8, 8};
  CHECK(std::isinf(psnr(T64::full(s, 0.3), T64::full(s, 0.3))));
  CHECK(psnr(T64::full(s, 0.5), T64::full(s, 0.4)) == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(std::abs(psnr(T64::full(s, 0.2 + 16.0 / 255), T64::full(s, 0.2)) - 20 * std::log10(255.0 / 16)) < 1e-3);
}

TEST_CASE("ssim closed forms") {
  const Shape s{3, 16, 16};
  const auto img = T64::uniform(s, 0, 1, 4);
  CHECK(std::abs(ssim(img, img) - 1.0) < 1e-9);
  CHECK(std::abs(ssim(T64::full(s, 0.5), T64::full(s, 0.25)) - (0.25 + 1e-4) / (0.3125 + 1e-4)) < 1e-4);

  std::vector<double> board(3 * 16 * 16), inverse(board.size());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        board[(c * 16 + y) * 16 + x] = (x + y) % 2 ? 1.0 : 0.0;
        inverse[(c * 16 + y) * 16 + x] = 1.0 - board[(c * 16 + y) * 16 + x];
      }
  CHECK(ssim(T64::from_values(s, inverse), T64::from_values(s, board)) < 0.0);
  CHECK_THROWS_AS(ssim(T64::zeros({3, 10, 16}), T64::zeros({3, 10, 16})), ParameterError);
}

TEST_CASE("metric report") {
  MetricReport r;
  r.add("a.png", 30.0, 0.9);
  r.add("b.png", std::numeric_limits<double>::infinity(), 1.0);
  CHECK(r.rows[1].psnr_db == kPsnrCap);
  const auto m = r.mean();
  CHECK(m.psnr_db == doctest::Approx((30.0 + 99.0) / 2));

  std::istringstream in(r.to_lines());
  std::string line;
  int n = 0;
  double sum_p = 0, sum_s = 0;
  double mean_p = 0, mean_s = 0;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string name;
    double p, s;
    REQUIRE(static_cast<bool>(f >> name >> p >> s));
    if (name == "MEAN") {
      mean_p = p, mean_s = s;
    } else {
      sum_p += p, sum_s += s, ++n;
    }
  }
  CHECK(n == 2);
  CHECK(std::abs(mean_p - sum_p / n) < 1e-6);
  CHECK(std::abs(mean_s - sum_s / n) < 1e-6);
  CHECK(r.to_table().find("MEAN") != std::string::npos);
}
