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

#include "losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ops.hpp"
#include "spectral.hpp"

namespace dsea {

void LossWeights::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw ConfigError("loss weights must be >= 0");
}

namespace {

template <typename T>
void require_same(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

}  // namespace

template <typename T>
Tensor<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& gt) {
  require_same(pred, gt, "l1_loss");
  return mean(abs(sub(pred, gt)));
}

template <typename T>
Tensor<T> fft_loss(const Tensor<T>& pred, const Tensor<T>& gt) {
  require_same(pred, gt, "fft_loss");
  // The DFT is linear, so the spectral difference is the spectrum of the
  // difference.
  const auto spec = fft2(sub(pred, gt));
  return mean(complex_modulus(spec.re, spec.im, kFftLossEps));
}

template <typename T>
Tensor<T> total_loss(const MultiScaleOutput<T>& out, const std::array<Tensor<T>, kLevels>& gt,
                     const LossWeights& w) {
  w.validate();
  Tensor<T> total;
  for (int s = 0; s < kLevels; ++s) {
    if (!out.preds[s].defined() || !gt[s].defined()) throw ShapeError("total_loss: missing scale");
    require_same(out.preds[s], gt[s], "total_loss");
    auto term = add(mul_scalar(l1_loss(out.preds[s], gt[s]), static_cast<T>(w.lambda1)),
                    mul_scalar(fft_loss(out.preds[s], gt[s]), static_cast<T>(w.lambda2)));
    total = total.defined() ? add(total, term) : term;
  }
  return total;
}

template <typename T>
double psnr(const Tensor<T>& pred, const Tensor<T>& gt) {
  require_same(pred, gt, "psnr");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    const double a = std::clamp(static_cast<double>(pred.data()[i]), 0.0, 1.0);
    const double b = std::clamp(static_cast<double>(gt.data()[i]), 0.0, 1.0);
    acc += (a - b) * (a - b);
  }
  const double mse = acc / static_cast<double>(pred.numel());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

std::array<double, kSsimWindow> gaussian_window() {
  std::array<double, kSsimWindow> w{};
  double total = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    w[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

// Valid-mode separable filtering of an h x w plane.
std::vector<double> filter_valid(const std::vector<double>& src, std::int64_t h, std::int64_t w,
                                 const std::array<double, kSsimWindow>& k) {
  const std::int64_t oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h * ow));
  for (std::int64_t i = 0; i < h; ++i)
    for (std::int64_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (int t = 0; t < kSsimWindow; ++t) acc += k[t] * src[i * w + j + t];
      tmp[i * ow + j] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh * ow));
  for (std::int64_t i = 0; i < oh; ++i)
    for (std::int64_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (int t = 0; t < kSsimWindow; ++t) acc += k[t] * tmp[(i + t) * ow + j];
      out[i * ow + j] = acc;
    }
  return out;
}

}  // namespace

template <typename T>
double ssim(const Tensor<T>& pred, const Tensor<T>& gt) {
  require_same(pred, gt, "ssim");
  if (pred.rank() != 3) throw ShapeError("ssim: expected [C,H,W]");
  const std::int64_t c = pred.dim(0), h = pred.dim(1), w = pred.dim(2);
  if (h < kSsimWindow || w < kSsimWindow) {
    throw ParameterError("ssim: image " + shape_str(pred.shape()) + " smaller than the 11x11 window");
  }
  const auto kernel = gaussian_window();
  const std::size_t plane = static_cast<std::size_t>(h * w);
  double total = 0.0;
  for (std::int64_t ch = 0; ch < c; ++ch) {
    std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      x[i] = std::clamp(static_cast<double>(pred.data()[ch * plane + i]), 0.0, 1.0);
      y[i] = std::clamp(static_cast<double>(gt.data()[ch * plane + i]), 0.0, 1.0);
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, h, w, kernel);
    const auto my = filter_valid(y, h, w, kernel);
    const auto mxx = filter_valid(xx, h, w, kernel);
    const auto myy = filter_valid(yy, h, w, kernel);
    const auto mxy = filter_valid(xy, h, w, kernel);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = mxx[i] - mx[i] * mx[i];
      const double vy = myy[i] - my[i] * my[i];
      const double cov = mxy[i] - mx[i] * my[i];
      acc += ((2.0 * mx[i] * my[i] + kSsimC1) * (2.0 * cov + kSsimC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kSsimC1) * (vx + vy + kSsimC2));
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / static_cast<double>(c);
}

void MetricReport::add(std::string name, double psnr_db, double ssim_value) {
  rows.push_back({std::move(name), std::min(psnr_db, kPsnrCap), ssim_value});
}

MetricRow MetricReport::mean() const {
  MetricRow m{"MEAN", 0.0, 0.0};
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    m.psnr_db += r.psnr_db;
    m.ssim += r.ssim;
  }
  m.psnr_db /= static_cast<double>(rows.size());
  m.ssim /= static_cast<double>(rows.size());
  return m;
}

std::string MetricReport::to_table() const {
  std::size_t width = 4;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-*s %10s %10s\n", static_cast<int>(width), "image", "PSNR(dB)", "SSIM");
  os << buf;
  auto emit = [&](const MetricRow& r) {
    std::snprintf(buf, sizeof buf, "%-*s %10.4f %10.6f\n", static_cast<int>(width), r.name.c_str(),
                  r.psnr_db, r.ssim);
    os << buf;
  };
  for (const auto& r : rows) emit(r);
  emit(mean());
  return os.str();
}

std::string MetricReport::to_lines() const {
  std::ostringstream os;
  char buf[64];
  auto emit = [&](const MetricRow& r) {
    std::snprintf(buf, sizeof buf, " %.10f %.10f\n", r.psnr_db, r.ssim);
    os << r.name << buf;
  };
  for (const auto& r : rows) emit(r);
  emit(mean());
  return os.str();
}

#define DSEA_INSTANTIATE(T)                                                                  \
  template Tensor<T> l1_loss(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> fft_loss(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> total_loss(const MultiScaleOutput<T>&,                                  \
                                const std::array<Tensor<T>, kLevels>&, const LossWeights&);  \
  template double psnr(const Tensor<T>&, const Tensor<T>&);                                  \
  template double ssim(const Tensor<T>&, const Tensor<T>&);

DSEA_INSTANTIATE(float)
DSEA_INSTANTIATE(double)

#undef DSEA_INSTANTIATE

}  // namespace dsea
