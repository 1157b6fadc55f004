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

#include "doctest.h"
#include "helpers.hpp"
#include "ops.hpp"
#include "spectral.hpp"

using namespace dsea;
using T64 = Tensor<double>;

namespace {

std::complex<double> dft_bin(const T64& x, std::int64_t c, std::int64_t u, std::int64_t v) {
  const auto h = x.dim(1), w = x.dim(2);
  std::complex<double> acc = 0;
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t xx = 0; xx < w; ++xx) {
      const double ph = -2 * std::numbers::pi * (double(u * y) / h + double(v * xx) / w);
      acc += x.data()[(c * h + y) * w + xx] * std::polar(1.0, ph);
    }
  return acc;
}

double dct_ref(const std::vector<double>& x, int h, int w, int u, int v) {
  double acc = 0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      acc += x[i * w + j] * std::cos(std::numbers::pi * (i + 0.5) * u / h) *
             std::cos(std::numbers::pi * (j + 0.5) * v / w);
  return acc * std::sqrt((u ? 2.0 : 1.0) / h) * std::sqrt((v ? 2.0 : 1.0) / w);
}

}  // namespace

TEST_CASE("fft_inplace round trip on awkward lengths") {
  for (int n : {1, 2, 3, 5, 8, 12, 17}) {
    std::vector<std::complex<double>> data(n);
    for (int i = 0; i < n; ++i) data[i] = {std::sin(i * 1.3), std::cos(i * 0.7)};
    auto copy = data;
    fft_inplace(copy);
    fft_inplace(copy, true);
    for (int i = 0; i < n; ++i) CHECK(std::abs(copy[i] / double(n) - data[i]) < 1e-12);
  }
}

TEST_CASE("fft2 of a constant is a lone DC bin") {
  const auto x = T64::full({1, 4, 6}, 0.25);
  const auto s = fft2(x);
  CHECK(std::abs(s.re.data()[0] - 0.25 * 24) < 1e-9);
  for (std::size_t i = 1; i < s.re.numel(); ++i) {
    CHECK(std::abs(s.re.data()[i]) < 1e-9);
    CHECK(std::abs(s.im.data()[i]) < 1e-9);
  }
  CHECK(std::abs(s.im.data()[0]) < 1e-9);
}

TEST_CASE("fft2 of an impulse has flat magnitude") {
  std::vector<double> v(5 * 7, 0.0);
  v[2 * 7 + 3] = 0.6;
  const auto s = fft2(T64::from_values({1, 5, 7}, v));
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::hypot(s.re.data()[i], s.im.data()[i]) == doctest::Approx(0.6));
}

TEST_CASE("fft2 matches the naive DFT") {
  for (auto [h, w] : {std::pair{8, 8}, std::pair{3, 5}, std::pair{6, 4}}) {
    const auto x = T64::uniform({2, h, w}, -1, 1, h * 10 + w);
    const auto s = fft2(x);
    double err = 0;
    for (int c = 0; c < 2; ++c)
      for (int u = 0; u < h; ++u)
        for (int v = 0; v < w; ++v) {
          const auto ref = dft_bin(x, c, u, v);
          const auto i = (c * h + u) * w + v;
          err = std::max({err, std::abs(s.re.data()[i] - ref.real()), std::abs(s.im.data()[i] - ref.imag())});
        }
    CHECK(err < 1e-9);
  }
}

TEST_CASE("dct2_coefficient") {
  CHECK(dct2_coefficient(T64::full({2, 2}, 0.3), 0, 0).item() == doctest::Approx(0.6));

  const auto x = T64::uniform({5, 6}, -1, 1, 2);
  double m = 0;
  for (double e : x.data()) m += e;
  m /= 30;
  CHECK(dct2_coefficient(x, 0, 0).item() == doctest::Approx(m * std::sqrt(30.0)).epsilon(1e-12));

  const auto y = T64::uniform({7, 7}, -1, 1, 3);
  const std::vector<double> yv(y.data().begin(), y.data().end());
  double err = 0;
  for (int u = 0; u < 7; ++u)
    for (int v = 0; v < 7; ++v) err = std::max(err, std::abs(dct2_coefficient(y, u, v).item() - dct_ref(yv, 7, 7, u, v)));
  CHECK(err < 1e-10);
  CHECK_THROWS_AS(dct2_coefficient(y, 7, 0), ParameterError);
}

TEST_CASE("dct basis is orthonormal") {
  for (int n : {1, 4, 7}) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double dot = 0;
        for (int i = 0; i < n; ++i) dot += dct_basis(n, a, i) * dct_basis(n, b, i);
        CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("zigzag selection") {
  const auto z = DctBasisSelection::zigzag(8);
  const std::vector<std::pair<int, int>> expect = {{0, 0}, {0, 1}, {1, 0}, {2, 0}, {1, 1}, {0, 2}, {0, 3}, {1, 2}};
  CHECK(z.pairs == expect);
  CHECK_THROWS_AS(z.validate(2, 8), ParameterError);
  CHECK_NOTHROW(z.validate(4, 4));
}

TEST_CASE("dct2_channel_coefficients picks one frequency per channel") {
  const auto x = T64::uniform({2, 4, 5}, -1, 1, 4);
  const auto c = dct2_channel_coefficients(x, {{0, 0}, {1, 3}});
  CHECK(c.shape() == Shape{2, 1, 1});
  const std::vector<double> ch1(x.data().begin() + 20, x.data().end());
  CHECK(c.data()[1] == doctest::Approx(dct_ref(ch1, 4, 5, 1, 3)).epsilon(1e-12));
}

TEST_CASE("frequency decomposition") {
  SUBCASE("constant input, gate 0, ratio 1 splits evenly") {
    const auto d = decompose_frequencies(T64::full({2, 3, 3}, 0.8), T64::zeros({2}), 1.0);
    for (double v : d.low.data()) CHECK(v == doctest::Approx(0.4));
    for (double v : d.high.data()) CHECK(v == doctest::Approx(0.4));
  }
  SUBCASE("very negative gate passes everything to the high band") {
    const auto f = T64::uniform({2, 4, 4}, -1, 1, 5);
    const auto d = decompose_frequencies(f, T64::full({2}, -60.0), 0.5);
    for (double v : d.low.data()) CHECK(std::abs(v) < 1e-20);
    CHECK(testing::max_abs_diff(d.high.data(), f.data()) < 1e-20);
  }
  SUBCASE("parts sum to the input") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto f = T64::uniform({3, 5, 7}, -2, 2, s);
      const auto d = decompose_frequencies(f, T64::uniform({3}, -3, 3, s + 100), 0.1 + 0.045 * s);
      CHECK(testing::max_abs_diff(add(d.low, d.high).data(), f.data()) < 1e-12);
      const auto f32 = Tensor<float>::uniform({3, 5, 7}, -2, 2, s);
      const auto d32 = decompose_frequencies(f32, Tensor<float>::uniform({3}, -3, 3, s + 100), 0.1 + 0.045 * s);
      CHECK(testing::max_abs_diff(add(d32.low, d32.high).data(), f32.data()) < 1e-6);
    }
  }
  CHECK_THROWS_AS(decompose_frequencies(T64::zeros({2, 3, 3}), T64::zeros({3}), 1.0), ShapeError);
}
