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

#include <string>
#include <utility>
#include <vector>

#include "trainer.hpp"

namespace dsea {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// One documented key of the flat key=value format.
struct ConfigKey {
  const char* name;
  const char* description;
};

const std::vector<ConfigKey>& run_config_keys();

// Applies one key to a training config; unknown keys and malformed values
// raise ConfigError naming the key.
void apply_config_entry(TrainConfig& cfg, const ConfigEntry& entry);

// Parses `key = value` lines; '#' starts a comment. Section headers are rejected.
TrainConfig parse_run_config(const std::string& text, const TrainConfig& base = {});
TrainConfig load_run_config(const std::filesystem::path& path);

std::string format_run_config(const TrainConfig& cfg);

struct ArmSpec {
  std::string name;
  TrainConfig config;
};

struct ExperimentPlan {
  TrainConfig base;
  std::vector<ArmSpec> arms;
};

// Top-level keys form the shared base; each `[arm NAME]` section overrides it.
ExperimentPlan parse_plan(const std::string& text);
ExperimentPlan load_plan(const std::filesystem::path& path);

}  // namespace dsea
