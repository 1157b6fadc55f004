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

#include "doctest.h"
#include "run_config.hpp"

using namespace dsea;

TEST_CASE("run config parsing") {
  const auto cfg = parse_run_config(
      "# comment\n"
      "base_width = 8\n"
      "  pooling_ratio=0.25   \n"
      "enable_sfm = false\n"
      "flips = 0\n"
      "seed = 12\n"
      "lr_max = 2e-4\n"
      "steps = 10\n");
  CHECK(cfg.model.base_width == 8);
  CHECK(cfg.model.pooling_ratio == 0.25);
  CHECK_FALSE(cfg.model.enable_sfm);
  CHECK(cfg.model.enable_dfesa);
  CHECK_FALSE(cfg.data.flips);
  CHECK(cfg.model.seed == 12);
  CHECK(cfg.data.seed == 12);
  CHECK(cfg.lr.lr_max == 2e-4);
  CHECK(cfg.steps == 10);
  CHECK(parse_run_config(format_run_config(cfg)).model == cfg.model);
  CHECK(format_run_config(parse_run_config(format_run_config(cfg))) == format_run_config(cfg));
}

TEST_CASE("run config errors name the line") {
  auto message = [](const std::string& text) {
    try {
      parse_run_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("steps = 3\nbogus = 1\n").find("line 2: unknown key 'bogus'") != std::string::npos);
  CHECK(message("steps = three\n").find("line 1") != std::string::npos);
  CHECK(message("enable_sfm = maybe\n").find("line 1") != std::string::npos);
  CHECK(message("steps\n").find("line 1") != std::string::npos);
  CHECK(message("[arm a]\n").find("only allowed in plan files") != std::string::npos);
  CHECK(message("pooling_ratio = 1.5\n") != "no error");
  CHECK(message("base_width = 12\n") != "no error");
}

TEST_CASE("every documented key is accepted") {
  const auto& keys = run_config_keys();
  CHECK(keys.size() == 18);
  TrainConfig cfg;
  for (const auto& k : keys) CHECK_NOTHROW(apply_config_entry(cfg, {k.name, "1", 1}));
}

TEST_CASE("experiment plans") {
  const auto plan = parse_plan(
      "steps = 5\n"
      "seed = 4\n"
      "[arm base]\n"
      "enable_dfesa = false\n"
      "enable_sfm = false\n"
      "[arm full]\n");
  REQUIRE(plan.arms.size() == 2);
  CHECK(plan.arms[0].name == "base");
  CHECK_FALSE(plan.arms[0].config.model.enable_dfesa);
  CHECK(plan.arms[1].config.model.enable_sfm);
  CHECK(plan.arms[1].config.steps == 5);
  CHECK(plan.arms[0].config.model.seed == 4);
  CHECK_THROWS_AS(parse_plan("[arm a]\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_plan("[arm a]\n[arm a]\n"), ConfigError);
  CHECK_THROWS_AS(parse_plan("steps = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_plan("[arm a]\npooling_ratio = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_plan("[section]\n"), ConfigError);
}
