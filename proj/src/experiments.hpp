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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "inference.hpp"
#include "run_config.hpp"

namespace dsea {

struct ArmResult {
  std::string name;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double final_loss = 0.0;
};

struct ComparisonTable {
  std::vector<ArmResult> rows;

  // `arm psnr ssim final_loss` rows after '#' reference comment lines.
  std::string to_text() const;
};

struct SweepRow {
  double ratio = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  // `ratio psnr ssim` rows after '#' reference comment lines.
  std::string to_text() const;
};

using ArmProgress = std::function<void(const std::string& arm, const TraceRow& row)>;

// Trains every arm on `train_data` with the plan's shared seed, evaluates on
// `test_data` and, when `out_dir` is set, writes per-arm checkpoints and
// ablation.txt there. Rows come back in plan order.
ComparisonTable run_ablation(const ExperimentPlan& plan, const Dataset& train_data,
                             const Dataset& test_data, const std::filesystem::path& out_dir = {},
                             const ArmProgress& progress = {});

// The standard three-arm plan over a shared base config.
ExperimentPlan default_ablation_plan(const TrainConfig& base);

// One training per ratio, otherwise identical; writes sweep.txt into out_dir.
SweepTable run_pooling_sweep(const std::vector<double>& ratios, const TrainConfig& base,
                             const Dataset& train_data, const Dataset& test_data,
                             const std::filesystem::path& out_dir = {},
                             const ArmProgress& progress = {});

}  // namespace dsea
