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

#include "selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "check.hpp"
#include "dfesa.hpp"
#include "losses.hpp"
#include "network.hpp"
#include "ops.hpp"
#include "sfm.hpp"
#include "spectral.hpp"

namespace dsea {

namespace {

using T64 = Tensor<double>;

constexpr double kGradTolerance = 1e-5;
constexpr double kGradStep = 1e-4;
constexpr std::uint64_t kGradSeeds[] = {11, 22, 33};

T64 leaf(const Shape& shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  return T64::uniform(shape, lo, hi, seed, true);
}

struct GradCase {
  std::string name;
  // Builds fresh inputs for a seed and returns the scalar function plus targets.
  std::function<std::pair<std::function<T64()>, std::vector<Named>>(std::uint64_t)> make;
};

template <typename Fn>
GradCase unary_case(std::string name, Shape shape, Fn fn) {
  return {name, [shape, fn](std::uint64_t s) {
            T64 x = leaf(shape, s);
            return std::pair{std::function<T64()>([=] { return random_projection(fn(x), s + 7); }),
                             std::vector<Named>{{"x", x}}};
          }};
}

ParamStore<double> block_store(const std::vector<ParamSpec>& specs, std::uint64_t seed) {
  ParamStore<double> store;
  instantiate_params(store, "", specs, seed);
  return store;
}

std::vector<GradCase> grad_cases() {
  std::vector<GradCase> cases;
  cases.push_back({"matmul", [](std::uint64_t s) {
                     T64 a = leaf({3, 4}, s), b = leaf({4, 5}, s + 1);
                     return std::pair{std::function<T64()>([=] { return random_projection(matmul(a, b), s + 2); }),
                                      std::vector<Named>{{"a", a}, {"b", b}}};
                   }});
  auto conv_case = [](std::string name, Shape xs, Shape ws, Conv2dOptions opt, bool bias) {
    return GradCase{name, [=](std::uint64_t s) {
                      T64 x = leaf(xs, s), w = leaf(ws, s + 1);
                      T64 b = bias ? leaf({ws[0]}, s + 2) : T64();
                      std::vector<Named> wrt{{"x", x}, {"w", w}};
                      if (bias) wrt.emplace_back("b", b);
                      return std::pair{std::function<T64()>([=] { return random_projection(conv2d(x, w, b, opt), s + 3); }),
                                       wrt};
                    }};
  };
  cases.push_back(conv_case("conv2d", {2, 5, 6}, {3, 2, 3, 3}, {1, 1, 1}, true));
  cases.push_back(conv_case("conv2d_stride2", {2, 6, 6}, {3, 2, 3, 3}, {2, 1, 1}, true));
  cases.push_back(conv_case("conv2d_depthwise", {3, 5, 5}, {3, 1, 3, 3}, {1, 1, 3}, false));
  cases.push_back(conv_case("conv2d_pointwise", {3, 4, 4}, {2, 3, 1, 1}, {}, true));
  cases.push_back({"layernorm", [](std::uint64_t s) {
                     T64 x = leaf({3, 4, 5}, s), g = leaf({3}, s + 1, 0.5, 1.5), b = leaf({3}, s + 2);
                     return std::pair{std::function<T64()>([=] { return random_projection(layernorm(x, g, b), s + 3); }),
                                      std::vector<Named>{{"x", x}, {"gamma", g}, {"beta", b}}};
                   }});
  cases.push_back(unary_case("relu", {3, 5}, [](const T64& x) { return relu(x); }));
  cases.push_back(unary_case("sigmoid", {3, 5}, [](const T64& x) { return sigmoid(x); }));
  cases.push_back(unary_case("softmax", {3, 5}, [](const T64& x) { return softmax_lastdim(x); }));
  cases.push_back(unary_case("abs", {3, 5}, [](const T64& x) { return abs(x); }));
  cases.push_back(unary_case("avg_pool_ratio_0.5", {2, 7, 6}, [](const T64& x) { return avg_pool_ratio(x, 0.5).low; }));
  cases.push_back(unary_case("avg_pool_ratio_1.0", {2, 7, 6}, [](const T64& x) { return avg_pool_ratio(x, 1.0).low; }));
  cases.push_back(unary_case("upsample_nearest", {2, 3, 3}, [](const T64& x) { return upsample_nearest(x, 7, 5); }));
  cases.push_back(unary_case("fft2_re", {2, 5, 6}, [](const T64& x) { return fft2(x).re; }));
  cases.push_back(unary_case("fft2_im", {2, 5, 6}, [](const T64& x) { return fft2(x).im; }));
  cases.push_back(unary_case("fft2_pow2", {1, 8, 8}, [](const T64& x) { return add(fft2(x).re, fft2(x).im); }));
  cases.push_back(unary_case("dct2_coefficient", {6, 7}, [](const T64& x) { return dct2_coefficient(x, 2, 3); }));
  cases.push_back(unary_case("dct2_channel", {3, 5, 5},
                             [](const T64& x) { return dct2_channel_coefficients(x, {{0, 0}, {1, 2}, {4, 1}}); }));
  cases.push_back(unary_case("transpose_reshape", {3, 4},
                             [](const T64& x) { return reshape(transpose2d(x), {2, 6}); }));
  cases.push_back(unary_case("mean", {2, 3, 4}, [](const T64& x) { return mean(x); }));
  cases.push_back(unary_case("select", {3, 2, 2}, [](const T64& x) { return select(x, 1); }));
  cases.push_back({"elementwise_broadcast", [](std::uint64_t s) {
                     T64 a = leaf({3, 1, 4}, s), b = leaf({1, 5, 1}, s + 1);
                     return std::pair{std::function<T64()>([=] {
                                        return random_projection(sub(mul(add(a, b), b), a), s + 2);
                                      }),
                                      std::vector<Named>{{"a", a}, {"b", b}}};
                   }});
  cases.push_back({"complex_modulus", [](std::uint64_t s) {
                     T64 a = leaf({2, 3}, s), b = leaf({2, 3}, s + 1);
                     return std::pair{std::function<T64()>([=] { return random_projection(complex_modulus(a, b, 1e-3), s + 2); }),
                                      std::vector<Named>{{"re", a}, {"im", b}}};
                   }});
  cases.push_back({"linear", [](std::uint64_t s) {
                     T64 x = leaf({4, 1, 1}, s), w = leaf({3, 4}, s + 1), b = leaf({3}, s + 2);
                     return std::pair{std::function<T64()>([=] { return random_projection(linear(x, w, b), s + 3); }),
                                      std::vector<Named>{{"x", x}, {"w", w}, {"b", b}}};
                   }});
  cases.push_back({"concat_channels", [](std::uint64_t s) {
                     T64 a = leaf({2, 3, 3}, s), b = leaf({1, 3, 3}, s + 1);
                     return std::pair{std::function<T64()>([=] { return random_projection(concat_channels(a, b), s + 2); }),
                                      std::vector<Named>{{"a", a}, {"b", b}}};
                   }});
  cases.push_back({"decompose_frequencies", [](std::uint64_t s) {
                     T64 f = leaf({3, 6, 5}, s), g = leaf({3}, s + 1);
                     return std::pair{std::function<T64()>([=] {
                                        const auto d = decompose_frequencies(f, g, 0.5);
                                        return add(random_projection(d.low, s + 2), random_projection(d.high, s + 3));
                                      }),
                                      std::vector<Named>{{"f", f}, {"gate", g}}};
                   }});
  auto dfesa_case = [](std::string name, bool plain) {
    return GradCase{name, [=](std::uint64_t s) {
                      auto store = std::make_shared<ParamStore<double>>(block_store(dfesa_param_specs(4, plain), s));
                      auto wrt = jittered_targets(*store, s, 0.3);
                      T64 x = leaf({4, 6, 6}, s + 1);
                      wrt.emplace_back("input", x);
                      return std::pair{std::function<T64()>([=] {
                                         return random_projection(
                                             dfesa_forward(x, DfesaParams<double>::from_store(*store, ""), 0.5), s + 2);
                                       }),
                                       wrt};
                    }};
  };
  cases.push_back(dfesa_case("dfesa_forward", false));
  cases.push_back(dfesa_case("dfesa_forward_plain", true));
  cases.push_back({"sfm_forward", [](std::uint64_t s) {
                     auto store = std::make_shared<ParamStore<double>>(block_store(sfm_param_specs(8), s));
                     auto wrt = jittered_targets(*store, s, 0.3);
                     T64 x = leaf({8, 6, 6}, s + 1);
                     wrt.emplace_back("input", x);
                     return std::pair{std::function<T64()>([=] {
                                        return random_projection(
                                            sfm_forward(x, SfmParams<double>::from_store(*store, "", 4)), s + 2);
                                      }),
                                      wrt};
                   }});
  cases.push_back({"resblock_forward", [](std::uint64_t s) {
                     auto store = std::make_shared<ParamStore<double>>(block_store(resblock_param_specs(4), s));
                     auto wrt = jittered_targets(*store, s, 0.3);
                     T64 x = leaf({4, 6, 6}, s + 1);
                     wrt.emplace_back("input", x);
                     return std::pair{std::function<T64()>([=] {
                                        return random_projection(
                                            resblock_forward(x, ResBlockParams<double>::from_store(*store, ""), 0.5), s + 2);
                                      }),
                                      wrt};
                   }});
  cases.push_back({"l1_loss", [](std::uint64_t s) {
                     T64 p = leaf({3, 4, 4}, s), g = leaf({3, 4, 4}, s + 1);
                     return std::pair{std::function<T64()>([=] { return l1_loss(p, g); }),
                                      std::vector<Named>{{"pred", p}, {"gt", g}}};
                   }});
  cases.push_back({"fft_loss", [](std::uint64_t s) {
                     T64 p = leaf({3, 4, 6}, s), g = leaf({3, 4, 6}, s + 1);
                     return std::pair{std::function<T64()>([=] { return fft_loss(p, g); }),
                                      std::vector<Named>{{"pred", p}, {"gt", g}}};
                   }});
  cases.push_back({"total_loss", [](std::uint64_t s) {
                     MultiScaleOutput<double> out;
                     std::array<T64, kLevels> gt;
                     std::vector<Named> wrt;
                     for (int l = 0; l < kLevels; ++l) {
                       const std::int64_t e = 8 >> l;
                       out.preds[l] = leaf({3, e, e}, s + 10 * l);
                       gt[l] = leaf({3, e, e}, s + 10 * l + 1, 0.0, 1.0);
                       wrt.emplace_back("pred" + std::to_string(l), out.preds[l]);
                     }
                     return std::pair{std::function<T64()>([=] { return total_loss(out, gt, LossWeights{}); }),
                                      wrt};
                   }});
  return cases;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

using DctFn = std::function<double(const T64&, int, int)>;

}  // namespace

SuiteResult selftest_grad() {
  Timer timer;
  SuiteResult r{"grad", true, {}, 0.0};
  double worst = 0.0;
  std::string worst_case;
  std::ostringstream failures;
  for (const auto& c : grad_cases()) {
    for (std::uint64_t seed : kGradSeeds) {
      auto [fn, wrt] = c.make(seed);
      const GradcheckResult g = gradcheck(fn, wrt, kGradStep);
      if (g.max_rel_error > worst) worst = g.max_rel_error, worst_case = c.name + "/" + g.worst;
      if (!(g.max_rel_error < kGradTolerance)) {
        r.passed = false;
        failures << " " << c.name << "[seed " << seed << "]/" << g.worst << "=" << sci(g.max_rel_error);
      }
    }
  }
  r.detail = "worst rel err " + sci(worst) + " (" + worst_case + ")";
  if (!r.passed) r.detail += "; failing:" + failures.str();
  r.seconds = timer.seconds();
  return r;
}

SuiteResult selftest_fft() {
  Timer timer;
  SuiteResult r{"fft", true, {}, 0.0};
  const std::pair<int, int> sizes[] = {{1, 1}, {2, 3}, {4, 4}, {5, 7}, {8, 8}, {3, 8}, {6, 5}, {7, 1}};
  double worst = 0.0;
  std::uint64_t seed = 100;
  for (const auto& [h, w] : sizes) {
    const T64 x = T64::uniform({2, h, w}, -1.0, 1.0, ++seed);
    const auto spec = fft2(x);
    const auto ref = naive_dft2(x.data(), 2, h, w);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max({worst, std::abs(spec.re.data()[i] - ref[i].real()),
                        std::abs(spec.im.data()[i] - ref[i].imag())});
    }
  }
  r.passed = worst < 1e-9;
  r.detail = "max abs err vs naive DFT " + sci(worst);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult selftest_dct(const SelftestOptions& opts) {
  Timer timer;
  SuiteResult r{"dct", true, {}, 0.0};
  DctFn under_test = [](const T64& x, int u, int v) { return dct2_coefficient(x, u, v).item(); };
  if (opts.inject_dct_norm_fault) {
    // Drops the 1/sqrt(2) DC weighting: every (0,v) and (u,0) coefficient is off by sqrt(2).
    under_test = [](const T64& x, int u, int v) {
      const double c = dct2_coefficient(x, u, v).item();
      return c * ((u == 0) ? std::numbers::sqrt2 : 1.0) * ((v == 0) ? std::numbers::sqrt2 : 1.0);
    };
  }
  constexpr int n = 7;
  double coef_err = 0.0, recon_err = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const T64 x = T64::uniform({n, n}, -1.0, 1.0, 200 + seed);
    std::vector<double> coeffs(n * n);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        coeffs[u * n + v] = under_test(x, u, v);
        coef_err = std::max(coef_err, std::abs(coeffs[u * n + v] - naive_dct2(x.data(), n, n, u, v)));
      }
    // Inverse from the orthonormal cosine definition.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) {
            const double au = std::sqrt((u == 0 ? 1.0 : 2.0) / n), av = std::sqrt((v == 0 ? 1.0 : 2.0) / n);
            acc += coeffs[u * n + v] * au * av * std::cos(std::numbers::pi * (2 * i + 1) * u / (2.0 * n)) *
                   std::cos(std::numbers::pi * (2 * j + 1) * v / (2.0 * n));
          }
        recon_err = std::max(recon_err, std::abs(acc - x.data()[i * n + j]));
      }
  }
  r.passed = coef_err < 1e-10 && recon_err < 1e-9;
  r.detail = "coef err " + sci(coef_err) + ", reconstruction err " + sci(recon_err);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult selftest_decomp() {
  Timer timer;
  SuiteResult r{"decomp", true, {}, 0.0};
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> chan(1, 4), ext(2, 9);
  std::uniform_real_distribution<double> ratio(0.05, 1.0);
  double err64 = 0.0, err32 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Shape shape{chan(rng), ext(rng), ext(rng)};
    const double q = trial == 0 ? 1.0 : ratio(rng);
    const std::uint64_t s = rng();
    const auto f64 = T64::uniform(shape, -2.0, 2.0, s);
    const auto g64 = T64::uniform({shape[0]}, -3.0, 3.0, s + 1);
    const auto d64 = decompose_frequencies(f64, g64, q);
    const auto f32 = Tensor<float>::uniform(shape, -2.0, 2.0, s);
    const auto g32 = Tensor<float>::uniform({shape[0]}, -3.0, 3.0, s + 1);
    const auto d32 = decompose_frequencies(f32, g32, q);
    for (std::size_t i = 0; i < f64.numel(); ++i) {
      err64 = std::max(err64, std::abs(d64.low.data()[i] + d64.high.data()[i] - f64.data()[i]));
      err32 = std::max(err32, static_cast<double>(std::abs(d32.low.data()[i] + d32.high.data()[i] - f32.data()[i])));
    }
  }
  r.passed = err64 < 1e-12 && err32 < 1e-6;
  r.detail = "check64 err " + sci(err64) + ", train32 err " + sci(err32);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult selftest_metrics() {
  Timer timer;
  SuiteResult r{"metrics", true, {}, 0.0};
  const Shape shape{3, 16, 16};
  const double p1 = psnr(T64::full(shape, 0.5), T64::full(shape, 0.4));
  const double p2 = psnr(T64::full(shape, 0.2 + 16.0 / 255.0), T64::full(shape, 0.2));
  const T64 img = T64::uniform(shape, 0.0, 1.0, 77);
  const double s1 = ssim(img, img);
  const double s2 = ssim(T64::full(shape, 0.5), T64::full(shape, 0.25));
  const double s2_ref = (2 * 0.125 + 1e-4) / (0.3125 + 1e-4);
  const bool ok1 = std::abs(p1 - 20.0) <= 1e-3, ok2 = std::abs(p2 - 20.0 * std::log10(255.0 / 16.0)) <= 1e-3;
  const bool ok3 = std::abs(s1 - 1.0) <= 1e-9, ok4 = std::abs(s2 - s2_ref) <= 1e-4;
  r.passed = ok1 && ok2 && ok3 && ok4;
  char buf[160];
  std::snprintf(buf, sizeof buf, "psnr0.1=%.6f psnr16/255=%.6f ssim_same=%.12f ssim_const=%.6f", p1, p2, s1, s2);
  r.detail = buf;
  r.seconds = timer.seconds();
  return r;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts) {
  std::vector<SuiteResult> out;
  auto guarded = [&](const std::string& name, const std::function<SuiteResult()>& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what(), 0.0});
    }
  };
  guarded("grad", selftest_grad);
  guarded("fft", selftest_fft);
  guarded("dct", [&] { return selftest_dct(opts); });
  guarded("decomp", selftest_decomp);
  guarded("metrics", selftest_metrics);
  return out;
}

}  // namespace dsea
