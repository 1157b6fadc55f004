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

#include "dfesa.hpp"

#include <cmath>

#include "ops.hpp"
#include "spectral.hpp"

namespace dsea {

std::vector<ParamSpec> dfesa_param_specs(std::int64_t c, bool plain_attention) {
  std::vector<ParamSpec> specs = {
      {"q_weight", {c, c, 1, 1}, InitKind::he_uniform, 0.0, c},
      {"q_bias", {c}, InitKind::zeros},
      {"k_weight", {c, c, 1, 1}, InitKind::he_uniform, 0.0, c},
      {"k_bias", {c}, InitKind::zeros},
      {"v_weight", {c, c, 1, 1}, InitKind::he_uniform, 0.0, c},
      {"v_bias", {c}, InitKind::zeros},
      {"ln_gamma", {c}, InitKind::ones},
      {"ln_beta", {c}, InitKind::zeros},
  };
  if (plain_attention) return specs;
  const std::vector<ParamSpec> freq = {
      {"freq_gate", {c}, InitKind::zeros},
      {"dw_low", {c, 1, 3, 3}, InitKind::he_uniform, 0.0, 9},
      {"dw_high", {c, 1, 3, 3}, InitKind::he_uniform, 0.0, 9},
      {"fc_low_weight", {c, c}, InitKind::he_uniform, 0.0, c},
      {"fc_low_bias", {c}, InitKind::constant, 1.0},
      {"fc_high_weight", {c, c}, InitKind::he_uniform, 0.0, c},
      {"fc_high_bias", {c}, InitKind::constant, 1.0},
      {"alpha", {1}, InitKind::zeros},
      {"beta", {1}, InitKind::ones},
  };
  specs.insert(specs.end(), freq.begin(), freq.end());
  return specs;
}

template <typename T>
DfesaParams<T> DfesaParams<T>::from_store(const ParamStore<T>& s, const std::string& prefix) {
  DfesaParams p;
  p.q_weight = s.at(prefix + "q_weight");
  p.q_bias = s.at(prefix + "q_bias");
  p.k_weight = s.at(prefix + "k_weight");
  p.k_bias = s.at(prefix + "k_bias");
  p.v_weight = s.at(prefix + "v_weight");
  p.v_bias = s.at(prefix + "v_bias");
  p.ln_gamma = s.at(prefix + "ln_gamma");
  p.ln_beta = s.at(prefix + "ln_beta");
  if (!s.contains(prefix + "freq_gate")) return p;
  p.freq_gate = s.at(prefix + "freq_gate");
  p.dw_low = s.at(prefix + "dw_low");
  p.dw_high = s.at(prefix + "dw_high");
  p.fc_low_weight = s.at(prefix + "fc_low_weight");
  p.fc_low_bias = s.at(prefix + "fc_low_bias");
  p.fc_high_weight = s.at(prefix + "fc_high_weight");
  p.fc_high_bias = s.at(prefix + "fc_high_bias");
  p.alpha = s.at(prefix + "alpha");
  p.beta = s.at(prefix + "beta");
  return p;
}

template <typename T>
Qkv<T> project_qkv(const Tensor<T>& f, const DfesaParams<T>& p) {
  const std::int64_t c = f.dim(0), hw = f.dim(1) * f.dim(2);
  auto xc = layernorm(f, p.ln_gamma, p.ln_beta);
  auto flat = [&](const Tensor<T>& t) { return reshape(t, {c, hw}); };
  return {flat(conv2d(xc, p.q_weight, p.q_bias)), flat(conv2d(xc, p.k_weight, p.k_bias)),
          flat(conv2d(xc, p.v_weight, p.v_bias))};
}

template <typename T>
Tensor<T> attention_map(const Tensor<T>& q, const Tensor<T>& k) {
  if (q.shape() != k.shape() || q.rank() != 2) {
    throw ShapeError("attention: q " + shape_str(q.shape()) + " vs k " + shape_str(k.shape()));
  }
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(q.dim(1))));
  return softmax_lastdim(mul_scalar(matmul(q, transpose2d(k)), scale));
}

template <typename T>
Tensor<T> channel_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                            std::int64_t height, std::int64_t width) {
  if (v.shape() != q.shape()) throw ShapeError("attention: v must match q");
  if (q.dim(1) != height * width) throw ShapeError("attention: H*W does not match token length");
  return reshape(matmul(attention_map(q, k), v), {q.dim(0), height, width});
}

template <typename T>
FrequencyFactors<T> frequency_factors(const Tensor<T>& f, const DfesaParams<T>& p, double ratio) {
  if (p.plain_attention()) throw ConfigError("frequency_factors: block has no frequency branch");
  const std::int64_t c = f.dim(0);
  const auto parts = decompose_frequencies(f, p.freq_gate, ratio);
  auto branch = [&](const Tensor<T>& x, const Tensor<T>& dw, const Tensor<T>& w,
                    const Tensor<T>& b) {
    auto d = conv2d(x, dw, Tensor<T>{}, {1, 1, static_cast<int>(c)});
    auto pooled = pool_windows(d, d.dim(1), d.dim(2));
    return relu(linear(pooled, w, b));
  };
  return {branch(parts.low, p.dw_low, p.fc_low_weight, p.fc_low_bias),
          branch(parts.high, p.dw_high, p.fc_high_weight, p.fc_high_bias)};
}

template <typename T>
Tensor<T> dfesa_combine(const Tensor<T>& x_hat, const FrequencyFactors<T>& factors,
                        const Tensor<T>& alpha, const Tensor<T>& beta, const Tensor<T>& residual) {
  auto boosted = add(x_hat, mul(factors.low, alpha));
  auto y = mul(boosted, mul(factors.high, beta));
  return add(y, residual);
}

template <typename T>
Tensor<T> dfesa_forward(const Tensor<T>& f, const DfesaParams<T>& p, double ratio) {
  if (f.rank() != 3) throw ShapeError("dfesa: expected [C,H,W], got " + shape_str(f.shape()));
  const auto qkv = project_qkv(f, p);
  auto x_hat = channel_attention(qkv.q, qkv.k, qkv.v, f.dim(1), f.dim(2));
  if (p.plain_attention()) return add(x_hat, f);
  return dfesa_combine(x_hat, frequency_factors(f, p, ratio), p.alpha, p.beta, f);
}

#define DSEA_INSTANTIATE(T)                                                                       \
  template struct DfesaParams<T>;                                                                 \
  template Qkv<T> project_qkv(const Tensor<T>&, const DfesaParams<T>&);                           \
  template Tensor<T> attention_map(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> channel_attention(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,      \
                                       std::int64_t, std::int64_t);                               \
  template FrequencyFactors<T> frequency_factors(const Tensor<T>&, const DfesaParams<T>&, double); \
  template Tensor<T> dfesa_combine(const Tensor<T>&, const FrequencyFactors<T>&, const Tensor<T>&, \
                                   const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> dfesa_forward(const Tensor<T>&, const DfesaParams<T>&, double);

DSEA_INSTANTIATE(float)
DSEA_INSTANTIATE(double)

#undef DSEA_INSTANTIATE

}  // namespace dsea
