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

#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "checkpoint.hpp"
#include "ops.hpp"
#include "png.hpp"
#include "spectral.hpp"

namespace dsea {

void LrSchedule::validate() const {
  if (!(lr_max > lr_min && lr_min > 0.0)) throw ConfigError("learning rates need lr_max > lr_min > 0");
  if (total_steps < 0) throw ConfigError("total_steps must be >= 0");
}

double cosine_lr(int step, const LrSchedule& s) {
  if (step <= 0) return s.lr_max;
  if (step >= s.total_steps) return s.lr_min;
  const double phase = std::numbers::pi * static_cast<double>(step) / static_cast<double>(s.total_steps);
  return s.lr_min + 0.5 * (s.lr_max - s.lr_min) * (1.0 + std::cos(phase));
}

template <typename T>
AdamState<T> AdamState<T>::for_params(const ParamStore<T>& params) {
  AdamState st;
  for (const auto& [name, t] : params) {
    st.m[name].assign(t.numel(), T(0));
    st.v[name].assign(t.numel(), T(0));
  }
  return st;
}

template <typename T>
void adam_step(ParamStore<T>& params, AdamState<T>& state, double lr) {
  for (const auto& [name, t] : params) {
    if (!t.has_grad()) throw ContractError("no gradient for parameter " + name);
    if (!state.m.count(name)) throw ContractError("optimizer state lacks parameter " + name);
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(AdamState<T>::beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(AdamState<T>::beta2, static_cast<double>(state.t));
  for (const auto& [name, t] : params) {
    Tensor<T> p = t;
    auto& m = state.m.at(name);
    auto& v = state.v.at(name);
    auto value = p.mutable_data();
    const auto g = p.grad();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double gi = g[i];
      const double mi = AdamState<T>::beta1 * m[i] + (1.0 - AdamState<T>::beta1) * gi;
      const double vi = AdamState<T>::beta2 * v[i] + (1.0 - AdamState<T>::beta2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = lr * (mi / c1) / (std::sqrt(vi / c2) + AdamState<T>::eps);
      value[i] = static_cast<T>(value[i] - update);
    }
  }
  params.zero_grad();
}

void TrainConfig::validate() const {
  model.validate();
  lr.validate();
  loss.validate();
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (data.patch < 4 || data.patch % 4 != 0) throw ConfigError("patch must be a positive multiple of 4");
  if (model.enable_sfm) {
    for (const auto& [u, v] : DctBasisSelection::zigzag(model.dct_groups).pairs) {
      if (std::max(u, v) >= data.patch / 4) {
        throw ConfigError("patch " + std::to_string(data.patch) + " too small for " +
                          std::to_string(model.dct_groups) + " DCT groups at the coarsest level");
      }
    }
  }
}

std::string format_trace_row(const TraceRow& row) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d %.9e %.17g", row.step, row.loss, row.lr);
  return buf;
}

std::filesystem::path trace_path_for(const std::filesystem::path& checkpoint_path) {
  auto p = checkpoint_path;
  p += ".trace";
  return p;
}

namespace {

std::string trace_text(const std::vector<TraceRow>& trace) {
  std::string out;
  for (const auto& row : trace) out += format_trace_row(row) + "\n";
  return out;
}

[[maybe_unused]] void assert_finite_params(const ParamStore<float>& params, int step) {
  for (const auto& [name, t] : params) {
    for (float v : t.data()) {
      if (!std::isfinite(v)) {
        throw NumericError("non-finite value in " + name + " after step " + std::to_string(step));
      }
    }
  }
}

}  // namespace

TrainResult train(const TrainConfig& cfg_in, const Dataset& data, const std::filesystem::path& out,
                  const StepCallback& on_step) {
  TrainConfig cfg = cfg_in;
  cfg.lr.total_steps = cfg.steps;
  cfg.validate();

  TrainResult result{build_model<float>(cfg.model), {}};
  ParamStore<float>& params = result.params;
  auto adam = AdamState<float>::for_params(params);

  std::uint64_t epoch = 0;
  auto stream = std::make_unique<BatchStream>(data, cfg.data, cfg.batch, epoch);
  if (cfg.steps > 0 && stream->batches_per_epoch() == 0) {
    throw DataError("dataset of " + std::to_string(data.size()) + " pairs is smaller than batch " +
                    std::to_string(cfg.batch));
  }

  const float inv_batch = 1.0f / static_cast<float>(cfg.batch);
  for (int step = 0; step < cfg.steps; ++step) {
    auto batch = stream->next();
    if (!batch) {
      stream = std::make_unique<BatchStream>(data, cfg.data, cfg.batch, ++epoch);
      batch = stream->next();
    }
    const double lr = cosine_lr(step, cfg.lr);
    double loss_sum = 0.0;
    for (const TrainItem& item : *batch) {
      const auto pred = model_forward(params, cfg.model, item.input);
      const auto loss = total_loss(pred, item.pyramid, cfg.loss);
      loss_sum += loss.item();
      backward(mul_scalar(loss, inv_batch));
    }
    const double mean_loss = loss_sum / cfg.batch;
    if (!std::isfinite(mean_loss)) {
      std::ostringstream os;
      os << "non-finite loss at step " << step << " (lr " << lr << ", batch";
      for (const auto& item : *batch) os << " " << item.id;
      os << ")";
      throw NumericError(os.str());
    }
    adam_step(params, adam, lr);
#ifndef NDEBUG
    assert_finite_params(params, step);
#endif
    result.trace.push_back({step, mean_loss, lr});
    if (on_step) on_step(result.trace.back(), params);
    if (!out.empty() && cfg.checkpoint_every > 0 && (step + 1) % cfg.checkpoint_every == 0 &&
        step + 1 < cfg.steps) {
      save_checkpoint(params, cfg.model, out);
      write_text_atomic(trace_path_for(out), trace_text(result.trace));
    }
  }

  if (!out.empty()) {
    save_checkpoint(params, cfg.model, out);
    write_text_atomic(trace_path_for(out), trace_text(result.trace));
  }
  return result;
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(ParamStore<float>&, AdamState<float>&, double);
template void adam_step(ParamStore<double>&, AdamState<double>&, double);

}  // namespace dsea
