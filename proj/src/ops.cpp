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

#include "ops.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsea {

namespace {

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc) {
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void require_rank(const Shape& s, std::size_t rank, const char* what) {
  if (s.size() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(s));
  }
}

// Maps a cell index to its pooling window; trailing cells fold into the last
// window.
struct WindowMap {
  std::int64_t extent;
  std::int64_t window;
  std::int64_t count;  // number of windows

  WindowMap(std::int64_t extent_, std::int64_t window_)
      : extent(extent_), window(window_), count(std::max<std::int64_t>(1, extent_ / window_)) {}

  std::int64_t operator()(std::int64_t i) const { return std::min(i / window, count - 1); }

  std::int64_t size_of(std::int64_t w) const {
    const std::int64_t begin = w * window;
    const std::int64_t end = (w == count - 1) ? extent : begin + window;
    return end - begin;
  }
};

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a.shape(), 2, "matmul");
  require_rank(b.shape(), 2, "matmul");
  const int m = static_cast<int>(a.dim(0));
  const int k = static_cast<int>(a.dim(1));
  const int n = static_cast<int>(b.dim(1));
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner extents differ, " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  }
  std::vector<T> out(static_cast<std::size_t>(m) * n);
  gemm(false, false, m, n, k, T(1), a.data().data(), k, b.data().data(), n, T(0), out.data(), n);
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return detail::make_result<T>(
      "matmul", {m, n}, std::move(out), {a, b}, [=](const std::vector<T>& g) {
        if (T* ga = an->grad_sink())
          gemm(false, true, m, k, n, T(1), g.data(), n, bn->value.data(), n, T(1), ga, k);
        if (T* gb = bn->grad_sink())
          gemm(true, false, k, n, m, T(1), an->value.data(), k, g.data(), n, T(1), gb, n);
      });
}

template <typename T>
Tensor<T> transpose2d(const Tensor<T>& a) {
  require_rank(a.shape(), 2, "transpose2d");
  const auto m = a.dim(0), n = a.dim(1);
  std::vector<T> out(a.numel());
  const auto& v = a.values();
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < n; ++j) out[j * m + i] = v[i * n + j];
  Node<T>* an = a.node();
  return detail::make_result<T>("transpose2d", {n, m}, std::move(out), {a},
                                [=](const std::vector<T>& g) {
                                  T* ga = an->grad_sink();
                                  for (std::int64_t i = 0; i < m; ++i)
                                    for (std::int64_t j = 0; j < n; ++j)
                                      ga[i * n + j] += g[j * m + i];
                                });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, const Shape& shape) {
  detail::check_shape(shape);
  if (shape_numel(shape) != static_cast<std::int64_t>(a.numel())) {
    throw ShapeError("reshape: " + shape_str(a.shape()) + " -> " + shape_str(shape));
  }
  Node<T>* an = a.node();
  return detail::make_result<T>("reshape", shape, a.values(), {a}, [=](const std::vector<T>& g) {
    T* ga = an->grad_sink();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, Conv2dOptions opts) {
  require_rank(x.shape(), 3, "conv2d input");
  require_rank(w.shape(), 4, "conv2d weight");
  const std::int64_t cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const std::int64_t cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int groups = opts.groups, stride = opts.stride, pad = opts.pad;
  if (groups < 1 || stride < 1 || pad < 0) throw ParameterError("conv2d: bad stride/pad/groups");
  if (cin % groups != 0 || cout % groups != 0) {
    throw ShapeError("conv2d: channels " + std::to_string(cin) + "->" + std::to_string(cout) +
                     " not divisible by groups " + std::to_string(groups));
  }
  const std::int64_t cin_g = cin / groups, cout_g = cout / groups;
  if (w.dim(1) != cin_g) {
    throw ShapeError("conv2d: weight " + shape_str(w.shape()) + " does not match input " +
                     shape_str(x.shape()) + " with groups " + std::to_string(groups));
  }
  if (kh % 2 == 0 || kw % 2 == 0) throw ShapeError("conv2d: kernel extents must be odd");
  if (b.defined() && (b.rank() != 1 || b.dim(0) != cout)) {
    throw ShapeError("conv2d: bias shape " + shape_str(b.shape()));
  }
  const std::int64_t span_h = h + 2 * pad - kh, span_w = wd + 2 * pad - kw;
  if (span_h < 0 || span_w < 0) throw ShapeError("conv2d: kernel larger than padded input");
  const std::int64_t ho = span_h / stride + 1, wo = span_w / stride + 1;
  const std::int64_t p = ho * wo;
  const std::int64_t k = cin_g * kh * kw;
  const bool pointwise = kh == 1 && kw == 1 && stride == 1 && pad == 0;

  std::vector<T> col;
  if (!pointwise) {
    col.assign(static_cast<std::size_t>(cin * kh * kw * p), T(0));
    const T* xv = x.data().data();
    for (std::int64_t c = 0; c < cin; ++c)
      for (std::int64_t ki = 0; ki < kh; ++ki)
        for (std::int64_t kj = 0; kj < kw; ++kj) {
          T* dst = col.data() + ((c * kh + ki) * kw + kj) * p;
          for (std::int64_t oy = 0; oy < ho; ++oy) {
            const std::int64_t iy = oy * stride - pad + ki;
            if (iy < 0 || iy >= h) continue;
            const T* src = xv + (c * h + iy) * wd;
            for (std::int64_t ox = 0; ox < wo; ++ox) {
              const std::int64_t ix = ox * stride - pad + kj;
              if (ix >= 0 && ix < wd) dst[oy * wo + ox] = src[ix];
            }
          }
        }
  }

  std::vector<T> out(static_cast<std::size_t>(cout * p), T(0));
  if (b.defined()) {
    for (std::int64_t co = 0; co < cout; ++co)
      std::fill_n(out.begin() + co * p, p, b.data()[co]);
  }
  const T* cols = pointwise ? x.data().data() : col.data();
  for (int g = 0; g < groups; ++g) {
    gemm(false, false, static_cast<int>(cout_g), static_cast<int>(p), static_cast<int>(k), T(1),
         w.data().data() + g * cout_g * k, static_cast<int>(k), cols + g * k * p,
         static_cast<int>(p), T(1), out.data() + g * cout_g * p, static_cast<int>(p));
  }

  Node<T>* xn = x.node();
  Node<T>* wn = w.node();
  Node<T>* bn = b.defined() ? b.node() : nullptr;
  std::vector<Tensor<T>> inputs{x, w};
  if (b.defined()) inputs.push_back(b);
  return detail::make_result<T>(
      "conv2d", {cout, ho, wo}, std::move(out), std::move(inputs),
      [=, col = std::move(col)](const std::vector<T>& g) {
        if (bn) {
          if (T* gb = bn->grad_sink()) {
            for (std::int64_t co = 0; co < cout; ++co) {
              T acc = 0;
              for (std::int64_t i = 0; i < p; ++i) acc += g[co * p + i];
              gb[co] += acc;
            }
          }
        }
        const T* cols_b = pointwise ? xn->value.data() : col.data();
        if (T* gw = wn->grad_sink()) {
          for (int gi = 0; gi < groups; ++gi) {
            gemm(false, true, static_cast<int>(cout_g), static_cast<int>(k), static_cast<int>(p),
                 T(1), g.data() + gi * cout_g * p, static_cast<int>(p), cols_b + gi * k * p,
                 static_cast<int>(p), T(1), gw + gi * cout_g * k, static_cast<int>(k));
          }
        }
        T* gx = xn->grad_sink();
        if (!gx) return;
        if (pointwise) {
          for (int gi = 0; gi < groups; ++gi) {
            gemm(true, false, static_cast<int>(k), static_cast<int>(p), static_cast<int>(cout_g),
                 T(1), wn->value.data() + gi * cout_g * k, static_cast<int>(k),
                 g.data() + gi * cout_g * p, static_cast<int>(p), T(1), gx + gi * k * p,
                 static_cast<int>(p));
          }
          return;
        }
        std::vector<T> dcol(static_cast<std::size_t>(cin * kh * kw * p));
        for (int gi = 0; gi < groups; ++gi) {
          gemm(true, false, static_cast<int>(k), static_cast<int>(p), static_cast<int>(cout_g),
               T(1), wn->value.data() + gi * cout_g * k, static_cast<int>(k),
               g.data() + gi * cout_g * p, static_cast<int>(p), T(0), dcol.data() + gi * k * p,
               static_cast<int>(p));
        }
        for (std::int64_t c = 0; c < cin; ++c)
          for (std::int64_t ki = 0; ki < kh; ++ki)
            for (std::int64_t kj = 0; kj < kw; ++kj) {
              const T* src = dcol.data() + ((c * kh + ki) * kw + kj) * p;
              for (std::int64_t oy = 0; oy < ho; ++oy) {
                const std::int64_t iy = oy * stride - pad + ki;
                if (iy < 0 || iy >= h) continue;
                T* dst = gx + (c * h + iy) * wd;
                for (std::int64_t ox = 0; ox < wo; ++ox) {
                  const std::int64_t ix = ox * stride - pad + kj;
                  if (ix >= 0 && ix < wd) dst[ix] += src[oy * wo + ox];
                }
              }
            }
      });
}

template <typename T>
Tensor<T> pool_windows(const Tensor<T>& x, std::int64_t wh, std::int64_t ww) {
  require_rank(x.shape(), 3, "pool_windows");
  if (wh < 1 || ww < 1) throw ParameterError("pool_windows: window must be >= 1");
  const std::int64_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const WindowMap rows(h, wh), cols(w, ww);
  const std::int64_t hp = rows.count, wp = cols.count;
  std::vector<T> out(static_cast<std::size_t>(c * hp * wp), T(0));
  const auto& xv = x.values();
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t i = 0; i < h; ++i) {
      T* orow = out.data() + (ch * hp + rows(i)) * wp;
      const T* xrow = xv.data() + (ch * h + i) * w;
      for (std::int64_t j = 0; j < w; ++j) orow[cols(j)] += xrow[j];
    }
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t a = 0; a < hp; ++a)
      for (std::int64_t bcol = 0; bcol < wp; ++bcol)
        out[(ch * hp + a) * wp + bcol] /= static_cast<T>(rows.size_of(a) * cols.size_of(bcol));
  Node<T>* xn = x.node();
  return detail::make_result<T>(
      "pool_windows", {c, hp, wp}, std::move(out), {x}, [=](const std::vector<T>& g) {
        T* gx = xn->grad_sink();
        for (std::int64_t ch = 0; ch < c; ++ch)
          for (std::int64_t i = 0; i < h; ++i) {
            const std::int64_t a = rows(i);
            for (std::int64_t j = 0; j < w; ++j) {
              const std::int64_t bcol = cols(j);
              gx[(ch * h + i) * w + j] += g[(ch * hp + a) * wp + bcol] /
                                          static_cast<T>(rows.size_of(a) * cols.size_of(bcol));
            }
          }
      });
}

template <typename T>
Tensor<T> unpool_windows(const Tensor<T>& pooled, std::int64_t height, std::int64_t width,
                         std::int64_t wh, std::int64_t ww) {
  require_rank(pooled.shape(), 3, "unpool_windows");
  if (wh < 1 || ww < 1) throw ParameterError("unpool_windows: window must be >= 1");
  const WindowMap rows(height, wh), cols(width, ww);
  const std::int64_t c = pooled.dim(0), hp = pooled.dim(1), wp = pooled.dim(2);
  if (hp != rows.count || wp != cols.count) {
    throw ShapeError("unpool_windows: pooled " + shape_str(pooled.shape()) +
                     " does not match target extent");
  }
  std::vector<T> out(static_cast<std::size_t>(c * height * width));
  const auto& pv = pooled.values();
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t i = 0; i < height; ++i) {
      const T* prow = pv.data() + (ch * hp + rows(i)) * wp;
      T* orow = out.data() + (ch * height + i) * width;
      for (std::int64_t j = 0; j < width; ++j) orow[j] = prow[cols(j)];
    }
  Node<T>* pn = pooled.node();
  return detail::make_result<T>(
      "unpool_windows", {c, height, width}, std::move(out), {pooled},
      [=](const std::vector<T>& g) {
        T* gp = pn->grad_sink();
        for (std::int64_t ch = 0; ch < c; ++ch)
          for (std::int64_t i = 0; i < height; ++i) {
            T* prow = gp + (ch * hp + rows(i)) * wp;
            const T* grow = g.data() + (ch * height + i) * width;
            for (std::int64_t j = 0; j < width; ++j) prow[cols(j)] += grow[j];
          }
      });
}

std::int64_t pool_window_for_ratio(std::int64_t extent, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ParameterError("pooling ratio must be in (0,1], got " + std::to_string(ratio));
  }
  // The small slack keeps e.g. 0.29 * 100 from flooring to 28.
  const auto window = static_cast<std::int64_t>(std::floor(ratio * static_cast<double>(extent) + 1e-9));
  return std::max<std::int64_t>(1, window);
}

template <typename T>
PoolResult<T> avg_pool_ratio(const Tensor<T>& x, double ratio) {
  require_rank(x.shape(), 3, "avg_pool_ratio");
  const std::int64_t wh = pool_window_for_ratio(x.dim(1), ratio);
  const std::int64_t ww = pool_window_for_ratio(x.dim(2), ratio);
  auto pooled = pool_windows(x, wh, ww);
  auto low = unpool_windows(pooled, x.dim(1), x.dim(2), wh, ww);
  return {pooled, low};
}

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, std::int64_t out_h, std::int64_t out_w) {
  require_rank(x.shape(), 3, "upsample_nearest");
  const std::int64_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (out_h < h || out_w < w) {
    throw ParameterError("upsample_nearest: cannot downscale " + shape_str(x.shape()) + " to " +
                         std::to_string(out_h) + "x" + std::to_string(out_w));
  }
  std::vector<std::int64_t> src_col(static_cast<std::size_t>(out_w));
  for (std::int64_t j = 0; j < out_w; ++j) src_col[j] = j * w / out_w;
  std::vector<T> out(static_cast<std::size_t>(c * out_h * out_w));
  const auto& xv = x.values();
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t i = 0; i < out_h; ++i) {
      const T* xrow = xv.data() + (ch * h + i * h / out_h) * w;
      T* orow = out.data() + (ch * out_h + i) * out_w;
      for (std::int64_t j = 0; j < out_w; ++j) orow[j] = xrow[src_col[j]];
    }
  Node<T>* xn = x.node();
  return detail::make_result<T>(
      "upsample_nearest", {c, out_h, out_w}, std::move(out), {x},
      [=, src_col = std::move(src_col)](const std::vector<T>& g) {
        T* gx = xn->grad_sink();
        for (std::int64_t ch = 0; ch < c; ++ch)
          for (std::int64_t i = 0; i < out_h; ++i) {
            T* xrow = gx + (ch * h + i * h / out_h) * w;
            const T* grow = g.data() + (ch * out_h + i) * out_w;
            for (std::int64_t j = 0; j < out_w; ++j) xrow[src_col[j]] += grow[j];
          }
      });
}

template <typename T>
Tensor<T> layernorm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                    double eps) {
  require_rank(x.shape(), 3, "layernorm");
  if (!(eps > 0.0)) throw ParameterError("layernorm: eps must be > 0");
  const std::int64_t c = x.dim(0), hw = x.dim(1) * x.dim(2);
  if (gamma.numel() != static_cast<std::size_t>(c) || beta.numel() != static_cast<std::size_t>(c)) {
    throw ShapeError("layernorm: affine parameters must have " + std::to_string(c) + " entries");
  }
  const auto& xv = x.values();
  const auto n = static_cast<double>(xv.size());
  double mu = 0.0;
  for (T v : xv) mu += v;
  mu /= n;
  double var = 0.0;
  for (T v : xv) var += (v - mu) * (v - mu);
  var /= n;
  const double inv_std = 1.0 / std::sqrt(var + eps);

  std::vector<T> xhat(xv.size());
  std::vector<T> out(xv.size());
  const auto& gv = gamma.values();
  const auto& bv = beta.values();
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t i = 0; i < hw; ++i) {
      const std::size_t idx = ch * hw + i;
      xhat[idx] = static_cast<T>((xv[idx] - mu) * inv_std);
      out[idx] = gv[ch] * xhat[idx] + bv[ch];
    }
  Node<T>* xn = x.node();
  Node<T>* gn = gamma.node();
  Node<T>* bn = beta.node();
  return detail::make_result<T>(
      "layernorm", x.shape(), std::move(out), {x, gamma, beta},
      [=, xhat = std::move(xhat)](const std::vector<T>& g) {
        if (T* gg = gn->grad_sink()) {
          for (std::int64_t ch = 0; ch < c; ++ch) {
            T acc = 0;
            for (std::int64_t i = 0; i < hw; ++i) acc += g[ch * hw + i] * xhat[ch * hw + i];
            gg[ch] += acc;
          }
        }
        if (T* gb = bn->grad_sink()) {
          for (std::int64_t ch = 0; ch < c; ++ch) {
            T acc = 0;
            for (std::int64_t i = 0; i < hw; ++i) acc += g[ch * hw + i];
            gb[ch] += acc;
          }
        }
        T* gx = xn->grad_sink();
        if (!gx) return;
        const auto& gam = gn->value;
        double sum_d = 0.0, sum_dx = 0.0;
        for (std::int64_t ch = 0; ch < c; ++ch)
          for (std::int64_t i = 0; i < hw; ++i) {
            const double d = static_cast<double>(g[ch * hw + i]) * gam[ch];
            sum_d += d;
            sum_dx += d * xhat[ch * hw + i];
          }
        const double mean_d = sum_d / n, mean_dx = sum_dx / n;
        for (std::int64_t ch = 0; ch < c; ++ch)
          for (std::int64_t i = 0; i < hw; ++i) {
            const std::size_t idx = ch * hw + i;
            const double d = static_cast<double>(g[idx]) * gam[ch];
            gx[idx] += static_cast<T>(inv_std * (d - mean_d - xhat[idx] * mean_dx));
          }
      });
}

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Activation kind) {
  const auto& xv = x.values();
  std::vector<T> out(xv.size());
  Node<T>* xn = x.node();
  switch (kind) {
    case Activation::relu:
      for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > T(0) ? xv[i] : T(0);
      return detail::make_result<T>("relu", x.shape(), std::move(out), {x},
                                    [=](const std::vector<T>& g) {
                                      T* gx = xn->grad_sink();
                                      const auto& v = xn->value;
                                      for (std::size_t i = 0; i < g.size(); ++i)
                                        if (v[i] > T(0)) gx[i] += g[i];
                                    });
    case Activation::sigmoid: {
      for (std::size_t i = 0; i < xv.size(); ++i) {
        const T v = xv[i];
        if (v >= T(0)) {
          out[i] = T(1) / (T(1) + std::exp(-v));
        } else {
          const T e = std::exp(v);
          out[i] = e / (T(1) + e);
        }
      }
      auto saved = out;
      return detail::make_result<T>("sigmoid", x.shape(), std::move(out), {x},
                                    [=, y = std::move(saved)](const std::vector<T>& g) {
                                      T* gx = xn->grad_sink();
                                      for (std::size_t i = 0; i < g.size(); ++i)
                                        gx[i] += g[i] * y[i] * (T(1) - y[i]);
                                    });
    }
    case Activation::softmax_lastdim: {
      const auto len = static_cast<std::size_t>(x.shape().back());
      const std::size_t rows = xv.size() / len;
      for (std::size_t r = 0; r < rows; ++r) {
        const T* in = xv.data() + r * len;
        T* o = out.data() + r * len;
        const T mx = *std::max_element(in, in + len);
        T total = 0;
        for (std::size_t j = 0; j < len; ++j) {
          o[j] = std::exp(in[j] - mx);
          total += o[j];
        }
        for (std::size_t j = 0; j < len; ++j) o[j] /= total;
      }
      auto saved = out;
      return detail::make_result<T>(
          "softmax", x.shape(), std::move(out), {x},
          [=, y = std::move(saved)](const std::vector<T>& g) {
            T* gx = xn->grad_sink();
            for (std::size_t r = 0; r < rows; ++r) {
              const T* yr = y.data() + r * len;
              const T* gr = g.data() + r * len;
              T dot = 0;
              for (std::size_t j = 0; j < len; ++j) dot += gr[j] * yr[j];
              for (std::size_t j = 0; j < len; ++j) gx[r * len + j] += yr[j] * (gr[j] - dot);
            }
          });
    }
  }
  throw ParameterError("unknown activation");
}

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::int64_t ea = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::int64_t eb = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (ea != eb && ea != 1 && eb != 1) {
      throw ShapeError("cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    }
    out[i] = std::max(ea, eb);
  }
  return out;
}

namespace {

// Strides of `s` laid over `out`, zero along broadcast dimensions.
std::vector<std::int64_t> broadcast_strides(const Shape& s, const Shape& out) {
  std::vector<std::int64_t> strides(out.size(), 0);
  std::int64_t stride = 1;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::size_t i = s.size() - 1 - k;
    const std::size_t o = out.size() - 1 - k;
    strides[o] = s[i] == 1 ? 0 : stride;
    stride *= s[i];
  }
  return strides;
}

// Visits every output index with the matching operand offsets.
template <typename F>
void for_each_broadcast(const Shape& out, const std::vector<std::int64_t>& sa,
                        const std::vector<std::int64_t>& sb, F&& f) {
  const std::size_t rank = out.size();
  const std::int64_t inner = out.back();
  const std::int64_t ia_step = sa.back(), ib_step = sb.back();
  const std::int64_t outer = shape_numel(out) / inner;
  std::vector<std::int64_t> idx(rank, 0);
  std::int64_t o = 0;
  for (std::int64_t r = 0; r < outer; ++r) {
    std::int64_t ia = 0, ib = 0;
    for (std::size_t d = 0; d + 1 < rank; ++d) {
      ia += idx[d] * sa[d];
      ib += idx[d] * sb[d];
    }
    for (std::int64_t j = 0; j < inner; ++j, ++o) f(o, ia + j * ia_step, ib + j * ib_step);
    for (std::size_t d = rank - 1; d-- > 0;) {
      if (++idx[d] < out[d]) break;
      idx[d] = 0;
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, const Tensor<T>& b, Elementwise kind) {
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  const auto& av = a.values();
  const auto& bv = b.values();
  const char* name = kind == Elementwise::add ? "add" : kind == Elementwise::sub ? "sub" : "mul";

  if (a.shape() == b.shape()) {
    std::vector<T> out(av.size());
    switch (kind) {
      case Elementwise::add:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
        break;
      case Elementwise::sub:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
        break;
      case Elementwise::mul:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
        break;
    }
    return detail::make_result<T>(name, a.shape(), std::move(out), {a, b},
                                  [=](const std::vector<T>& g) {
                                    const std::size_t n = g.size();
                                    if (T* ga = an->grad_sink()) {
                                      if (kind == Elementwise::mul) {
                                        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * bn->value[i];
                                      } else {
                                        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
                                      }
                                    }
                                    if (T* gb = bn->grad_sink()) {
                                      if (kind == Elementwise::mul) {
                                        for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * an->value[i];
                                      } else if (kind == Elementwise::sub) {
                                        for (std::size_t i = 0; i < n; ++i) gb[i] -= g[i];
                                      } else {
                                        for (std::size_t i = 0; i < n; ++i) gb[i] += g[i];
                                      }
                                    }
                                  });
  }

  Shape out_shape = broadcast_shapes(a.shape(), b.shape());
  auto sa = broadcast_strides(a.shape(), out_shape);
  auto sb = broadcast_strides(b.shape(), out_shape);
  std::vector<T> out(static_cast<std::size_t>(shape_numel(out_shape)));
  switch (kind) {
    case Elementwise::add:
      for_each_broadcast(out_shape, sa, sb, [&](auto o, auto i, auto j) { out[o] = av[i] + bv[j]; });
      break;
    case Elementwise::sub:
      for_each_broadcast(out_shape, sa, sb, [&](auto o, auto i, auto j) { out[o] = av[i] - bv[j]; });
      break;
    case Elementwise::mul:
      for_each_broadcast(out_shape, sa, sb, [&](auto o, auto i, auto j) { out[o] = av[i] * bv[j]; });
      break;
  }
  return detail::make_result<T>(
      name, out_shape, std::move(out), {a, b},
      [=](const std::vector<T>& g) {
        T* ga = an->grad_sink();
        T* gb = bn->grad_sink();
        const auto& va = an->value;
        const auto& vb = bn->value;
        for_each_broadcast(out_shape, sa, sb, [&](auto o, auto i, auto j) {
          switch (kind) {
            case Elementwise::add:
              if (ga) ga[i] += g[o];
              if (gb) gb[j] += g[o];
              break;
            case Elementwise::sub:
              if (ga) ga[i] += g[o];
              if (gb) gb[j] -= g[o];
              break;
            case Elementwise::mul:
              if (ga) ga[i] += g[o] * vb[j];
              if (gb) gb[j] += g[o] * va[i];
              break;
          }
        });
      });
}

template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, T b, Elementwise kind) {
  const auto& av = a.values();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (kind) {
      case Elementwise::add: out[i] = av[i] + b; break;
      case Elementwise::sub: out[i] = av[i] - b; break;
      case Elementwise::mul: out[i] = av[i] * b; break;
    }
  }
  Node<T>* an = a.node();
  const T scale = kind == Elementwise::mul ? b : T(1);
  return detail::make_result<T>("scalar_op", a.shape(), std::move(out), {a},
                                [=](const std::vector<T>& g) {
                                  T* ga = an->grad_sink();
                                  for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * scale;
                                });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T acc = 0;
  for (T v : a.data()) acc += v;
  Node<T>* an = a.node();
  return detail::make_result<T>("sum", {1}, {acc}, {a}, [=](const std::vector<T>& g) {
    T* ga = an->grad_sink();
    for (std::size_t i = 0; i < an->value.size(); ++i) ga[i] += g[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  T acc = 0;
  for (T v : a.data()) acc += v;
  const T n = static_cast<T>(a.numel());
  Node<T>* an = a.node();
  return detail::make_result<T>("mean", {1}, {acc / n}, {a}, [=](const std::vector<T>& g) {
    T* ga = an->grad_sink();
    const T d = g[0] / n;
    for (std::size_t i = 0; i < an->value.size(); ++i) ga[i] += d;
  });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& a) {
  const auto& av = a.values();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = std::abs(av[i]);
  Node<T>* an = a.node();
  return detail::make_result<T>("abs", a.shape(), std::move(out), {a},
                                [=](const std::vector<T>& g) {
                                  T* ga = an->grad_sink();
                                  const auto& v = an->value;
                                  for (std::size_t i = 0; i < g.size(); ++i) {
                                    if (v[i] > T(0)) ga[i] += g[i];
                                    else if (v[i] < T(0)) ga[i] -= g[i];
                                  }
                                });
}

template <typename T>
Tensor<T> complex_modulus(const Tensor<T>& re, const Tensor<T>& im, double eps) {
  if (re.shape() != im.shape()) {
    throw ShapeError("complex_modulus: " + shape_str(re.shape()) + " vs " + shape_str(im.shape()));
  }
  const auto& rv = re.values();
  const auto& iv = im.values();
  const T eps2 = static_cast<T>(eps * eps);
  std::vector<T> out(rv.size());
  for (std::size_t i = 0; i < rv.size(); ++i) out[i] = std::sqrt(rv[i] * rv[i] + iv[i] * iv[i] + eps2);
  auto saved = out;
  Node<T>* rn = re.node();
  Node<T>* in = im.node();
  return detail::make_result<T>(
      "complex_modulus", re.shape(), std::move(out), {re, im},
      [=, m = std::move(saved)](const std::vector<T>& g) {
        if (T* gr = rn->grad_sink())
          for (std::size_t i = 0; i < g.size(); ++i) gr[i] += g[i] * rn->value[i] / m[i];
        if (T* gi = in->grad_sink())
          for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * in->value[i] / m[i];
      });
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a.shape(), 3, "concat_channels");
  require_rank(b.shape(), 3, "concat_channels");
  if (a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2)) {
    throw ShapeError("concat_channels: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  std::vector<T> out;
  out.reserve(a.numel() + b.numel());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  const std::size_t na = a.numel();
  return detail::make_result<T>("concat_channels", {a.dim(0) + b.dim(0), a.dim(1), a.dim(2)},
                                std::move(out), {a, b}, [=](const std::vector<T>& g) {
                                  if (T* ga = an->grad_sink())
                                    for (std::size_t i = 0; i < na; ++i) ga[i] += g[i];
                                  if (T* gb = bn->grad_sink())
                                    for (std::size_t i = na; i < g.size(); ++i) gb[i - na] += g[i];
                                });
}

template <typename T>
Tensor<T> select(const Tensor<T>& a, std::int64_t index) {
  if (index < 0 || index >= a.dim(0)) throw ShapeError("select: index out of range");
  Shape out_shape(a.shape().begin() + 1, a.shape().end());
  if (out_shape.empty()) out_shape = {1};
  const auto stride = static_cast<std::size_t>(shape_numel(out_shape));
  const std::size_t offset = static_cast<std::size_t>(index) * stride;
  std::vector<T> out(a.data().begin() + offset, a.data().begin() + offset + stride);
  Node<T>* an = a.node();
  return detail::make_result<T>("select", out_shape, std::move(out), {a},
                                [=](const std::vector<T>& g) {
                                  T* ga = an->grad_sink() + offset;
                                  for (std::size_t i = 0; i < stride; ++i) ga[i] += g[i];
                                });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  require_rank(w.shape(), 2, "linear weight");
  const std::int64_t out = w.dim(0), in = w.dim(1);
  if (static_cast<std::int64_t>(x.numel()) != in) {
    throw ShapeError("linear: input " + shape_str(x.shape()) + " vs weight " + shape_str(w.shape()));
  }
  auto y = matmul(w, reshape(x, {in, 1}));
  if (b.defined()) y = add(y, reshape(b, {out, 1}));
  return reshape(y, {out, 1, 1});
}

#define DSEA_INSTANTIATE(T)                                                                       \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> transpose2d(const Tensor<T>&);                                               \
  template Tensor<T> reshape(const Tensor<T>&, const Shape&);                                     \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Conv2dOptions); \
  template Tensor<T> pool_windows(const Tensor<T>&, std::int64_t, std::int64_t);                  \
  template Tensor<T> unpool_windows(const Tensor<T>&, std::int64_t, std::int64_t, std::int64_t,   \
                                    std::int64_t);                                                \
  template PoolResult<T> avg_pool_ratio(const Tensor<T>&, double);                                \
  template Tensor<T> upsample_nearest(const Tensor<T>&, std::int64_t, std::int64_t);              \
  template Tensor<T> layernorm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, double);     \
  template Tensor<T> activation(const Tensor<T>&, Activation);                                    \
  template Tensor<T> elementwise(const Tensor<T>&, const Tensor<T>&, Elementwise);                \
  template Tensor<T> elementwise(const Tensor<T>&, T, Elementwise);                               \
  template Tensor<T> sum(const Tensor<T>&);                                                       \
  template Tensor<T> mean(const Tensor<T>&);                                                      \
  template Tensor<T> abs(const Tensor<T>&);                                                       \
  template Tensor<T> complex_modulus(const Tensor<T>&, const Tensor<T>&, double);                 \
  template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> select(const Tensor<T>&, std::int64_t);                                      \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);

DSEA_INSTANTIATE(float)
DSEA_INSTANTIATE(double)

#undef DSEA_INSTANTIATE

}  // namespace dsea
