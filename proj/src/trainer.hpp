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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "losses.hpp"
#include "network.hpp"

namespace dsea {

struct LrSchedule {
  double lr_max = 1e-4;
  double lr_min = 1e-6;
  int total_steps = 0;

  void validate() const;
};

// Half-cosine from lr_max at step 0 to lr_min at total_steps; clamps past the end.
double cosine_lr(int step, const LrSchedule& s);

template <typename T>
struct AdamState {
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double eps = 1e-8;

  std::map<std::string, std::vector<T>> m, v;
  std::int64_t t = 0;

  static AdamState for_params(const ParamStore<T>& params);
};

// Bias-corrected Adam update in place, then clears every gradient.
template <typename T>
void adam_step(ParamStore<T>& params, AdamState<T>& state, double lr);

struct TrainConfig {
  ModelConfig model;
  DatasetSpec data;
  LrSchedule lr;
  LossWeights loss;
  int steps = 0;
  int batch = 4;
  int checkpoint_every = 0;  // 0 writes only the final checkpoint

  void validate() const;
};

struct TraceRow {
  int step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

std::string format_trace_row(const TraceRow& row);

struct TrainResult {
  ParamStore<float> params;
  std::vector<TraceRow> trace;
};

// Loss trace lands next to the checkpoint as `<out>.trace`.
std::filesystem::path trace_path_for(const std::filesystem::path& checkpoint_path);

using StepCallback = std::function<void(const TraceRow&, const ParamStore<float>&)>;

// Runs the full loop in memory. With an empty out path nothing is written.
TrainResult train(const TrainConfig& cfg, const Dataset& data,
                  const std::filesystem::path& out = {}, const StepCallback& on_step = {});

}  // namespace dsea
