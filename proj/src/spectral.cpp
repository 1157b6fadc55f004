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

#include "spectral.hpp"

#include <cmath>
#include <numbers>

#include "ops.hpp"

namespace dsea {

namespace {

using cd = std::complex<double>;

bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

void fft_radix2(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cd> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cd u = a[i + k];
        const cd v = a[i + k + half] * twiddle[k * step];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

void fft_bluestein(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small and exact.
    const std::size_t kk = (k * k) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(kk) / static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cd> fa(m), fb(m);
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(chirp[k]);
  fft_radix2(fa, false);
  fft_radix2(fb, false);
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  fft_radix2(fa, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * scale * chirp[k];
}

}  // namespace

void fft_inplace(std::vector<cd>& data, bool inverse) {
  if (data.size() <= 1) return;
  if (is_pow2(data.size())) {
    fft_radix2(data, inverse);
  } else {
    fft_bluestein(data, inverse);
  }
}

void fft2_planes(std::vector<cd>& data, std::int64_t channels, std::int64_t height,
                 std::int64_t width, bool inverse) {
  std::vector<cd> line(static_cast<std::size_t>(std::max(height, width)));
  for (std::int64_t c = 0; c < channels; ++c) {
    cd* plane = data.data() + c * height * width;
    line.resize(static_cast<std::size_t>(width));
    for (std::int64_t i = 0; i < height; ++i) {
      std::copy_n(plane + i * width, width, line.begin());
      fft_inplace(line, inverse);
      std::copy_n(line.begin(), width, plane + i * width);
    }
    line.resize(static_cast<std::size_t>(height));
    for (std::int64_t j = 0; j < width; ++j) {
      for (std::int64_t i = 0; i < height; ++i) line[i] = plane[i * width + j];
      fft_inplace(line, inverse);
      for (std::int64_t i = 0; i < height; ++i) plane[i * width + j] = line[i];
    }
  }
}

template <typename T>
ComplexPlane<T> fft2(const Tensor<T>& x) {
  if (x.rank() != 3) throw ShapeError("fft2: expected [C,H,W], got " + shape_str(x.shape()));
  const std::int64_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t n = x.numel();
  std::vector<cd> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = x.data()[i];
  fft2_planes(buf, c, h, w);
  std::vector<T> stacked(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    stacked[i] = static_cast<T>(buf[i].real());
    stacked[n + i] = static_cast<T>(buf[i].imag());
  }
  Node<T>* xn = x.node();
  // d/dx of (Re X, Im X) against upstream (gRe, gIm) is Re(DFT(gRe - i gIm)).
  auto spectrum = detail::make_result<T>(
      "fft2", {2, c, h, w}, std::move(stacked), {x}, [=](const std::vector<T>& g) {
        std::vector<cd> gb(n);
        for (std::size_t i = 0; i < n; ++i) gb[i] = {static_cast<double>(g[i]), -static_cast<double>(g[n + i])};
        fft2_planes(gb, c, h, w);
        T* gx = xn->grad_sink();
        for (std::size_t i = 0; i < n; ++i) gx[i] += static_cast<T>(gb[i].real());
      });
  return {select(spectrum, 0), select(spectrum, 1)};
}

DctBasisSelection DctBasisSelection::zigzag(int count) {
  if (count < 1) throw ParameterError("DCT basis selection needs at least one frequency");
  DctBasisSelection sel;
  // Walk anti-diagonals s = u + v, alternating direction as in JPEG.
  for (int s = 0; static_cast<int>(sel.pairs.size()) < count; ++s) {
    for (int t = 0; t <= s && static_cast<int>(sel.pairs.size()) < count; ++t) {
      const int u = (s % 2 == 0) ? s - t : t;
      sel.pairs.emplace_back(u, s - u);
    }
  }
  return sel;
}

void DctBasisSelection::validate(std::int64_t height, std::int64_t width) const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (pairs[i] == pairs[j]) throw ParameterError("DCT basis selection has duplicate pairs");
    }
    if (pairs[i].first < 0 || pairs[i].first >= height || pairs[i].second < 0 ||
        pairs[i].second >= width) {
      throw ParameterError("DCT frequency (" + std::to_string(pairs[i].first) + "," +
                           std::to_string(pairs[i].second) + ") out of range for " +
                           std::to_string(height) + "x" + std::to_string(width));
    }
  }
}

double dct_basis(std::int64_t n, std::int64_t k, std::int64_t i) {
  const double nn = static_cast<double>(n);
  const double alpha = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
  return alpha * std::cos(std::numbers::pi * static_cast<double>((2 * i + 1) * k) / (2.0 * nn));
}

template <typename T>
Tensor<T> dct2_channel_coefficients(const Tensor<T>& x,
                                    const std::vector<std::pair<int, int>>& freqs) {
  if (x.rank() != 3) throw ShapeError("dct2: expected [C,H,W], got " + shape_str(x.shape()));
  const std::int64_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (static_cast<std::int64_t>(freqs.size()) != c) {
    throw ShapeError("dct2: need one frequency per channel");
  }
  // Separable basis images, stored per channel as row and column factors.
  std::vector<T> row_basis(static_cast<std::size_t>(c * h)), col_basis(static_cast<std::size_t>(c * w));
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const auto [u, v] = freqs[ch];
    if (u < 0 || u >= h || v < 0 || v >= w) {
      throw ParameterError("dct2: frequency (" + std::to_string(u) + "," + std::to_string(v) +
                           ") out of range for " + std::to_string(h) + "x" + std::to_string(w));
    }
    for (std::int64_t i = 0; i < h; ++i) row_basis[ch * h + i] = static_cast<T>(dct_basis(h, u, i));
    for (std::int64_t j = 0; j < w; ++j) col_basis[ch * w + j] = static_cast<T>(dct_basis(w, v, j));
  }
  std::vector<T> out(static_cast<std::size_t>(c));
  const auto& xv = x.values();
  for (std::int64_t ch = 0; ch < c; ++ch) {
    T acc = 0;
    for (std::int64_t i = 0; i < h; ++i) {
      T row = 0;
      const T* xr = xv.data() + (ch * h + i) * w;
      for (std::int64_t j = 0; j < w; ++j) row += xr[j] * col_basis[ch * w + j];
      acc += row * row_basis[ch * h + i];
    }
    out[ch] = acc;
  }
  Node<T>* xn = x.node();
  return detail::make_result<T>(
      "dct2", {c, 1, 1}, std::move(out), {x},
      [=, row_basis = std::move(row_basis), col_basis = std::move(col_basis)](const std::vector<T>& g) {
        T* gx = xn->grad_sink();
        for (std::int64_t ch = 0; ch < c; ++ch)
          for (std::int64_t i = 0; i < h; ++i) {
            const T ri = g[ch] * row_basis[ch * h + i];
            T* gr = gx + (ch * h + i) * w;
            for (std::int64_t j = 0; j < w; ++j) gr[j] += ri * col_basis[ch * w + j];
          }
      });
}

template <typename T>
Tensor<T> dct2_coefficient(const Tensor<T>& x, int u, int v) {
  if (x.rank() != 2) throw ShapeError("dct2_coefficient: expected [h,w], got " + shape_str(x.shape()));
  auto coeff = dct2_channel_coefficients(reshape(x, {1, x.dim(0), x.dim(1)}), {{u, v}});
  return reshape(coeff, {1});
}

template <typename T>
FrequencyPair<T> decompose_frequencies(const Tensor<T>& f, const Tensor<T>& gate, double ratio) {
  if (f.rank() != 3) throw ShapeError("decompose_frequencies: expected [C,H,W]");
  if (gate.numel() != static_cast<std::size_t>(f.dim(0))) {
    throw ShapeError("decompose_frequencies: gate needs one entry per channel");
  }
  auto dc = avg_pool_ratio(f, ratio).low;
  auto low = mul(dc, sigmoid(reshape(gate, {f.dim(0), 1, 1})));
  auto high = sub(f, low);
  return {low, high};
}

#define DSEA_INSTANTIATE(T)                                                                   \
  template ComplexPlane<T> fft2(const Tensor<T>&);                                            \
  template Tensor<T> dct2_channel_coefficients(const Tensor<T>&,                              \
                                               const std::vector<std::pair<int, int>>&);      \
  template Tensor<T> dct2_coefficient(const Tensor<T>&, int, int);                            \
  template FrequencyPair<T> decompose_frequencies(const Tensor<T>&, const Tensor<T>&, double);

DSEA_INSTANTIATE(float)
DSEA_INSTANTIATE(double)

#undef DSEA_INSTANTIATE

}  // namespace dsea
