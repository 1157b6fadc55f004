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

#include <dsea/dsea.h>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

// Thrown by check() to unwind to main with a mapped exit code.
struct CommandFailure {
  int code;
};

int exit_code_for(dsea_status status) {
  switch (status) {
    case DSEA_OK: return 0;
    case DSEA_ERR_CONFIG: return kExitConfig;
    case DSEA_ERR_DATA: return kExitData;
    default: return kExitFailure;
  }
}

void check(dsea_status status, const std::string& what) {
  if (status == DSEA_OK) return;
  std::fprintf(stderr, "dsea: %s: %s: %s\n", what.c_str(), dsea_status_name(status), dsea_last_error());
  throw CommandFailure{exit_code_for(status)};
}

// Creates a C handle through `create`; the owner releases it on every exit path.
template <typename H, void (*Free)(H*), typename Fn>
std::unique_ptr<H, void (*)(H*)> acquire(Fn&& create, const std::string& what) {
  H* raw = nullptr;
  check(create(&raw), what);
  return {raw, Free};
}

using ConfigPtr = std::unique_ptr<dsea_config, void (*)(dsea_config*)>;
using DatasetPtr = std::unique_ptr<dsea_dataset, void (*)(dsea_dataset*)>;
using ModelPtr = std::unique_ptr<dsea_model, void (*)(dsea_model*)>;
using TextPtr = std::unique_ptr<dsea_text, void (*)(dsea_text*)>;

ConfigPtr load_config(const std::string& path) {
  if (path.empty()) {
    return acquire<dsea_config, dsea_config_free>([](dsea_config** o) { return dsea_config_default(o); },
                                                  "default config");
  }
  return acquire<dsea_config, dsea_config_free>(
      [&](dsea_config** o) { return dsea_config_load(path.c_str(), o); }, "config " + path);
}

DatasetPtr open_dataset(const std::string& dir) {
  return acquire<dsea_dataset, dsea_dataset_free>(
      [&](dsea_dataset** o) { return dsea_dataset_open(dir.c_str(), o); }, "dataset " + dir);
}

ModelPtr load_model(const std::string& path) {
  return acquire<dsea_model, dsea_model_free>(
      [&](dsea_model** o) { return dsea_model_load(path.c_str(), o); }, "checkpoint " + path);
}

struct Progress {
  int every = 0;
};

void on_train_step(int step, double loss, double lr, void* user) {
  const auto* p = static_cast<const Progress*>(user);
  if (p->every > 0 && step % p->every == 0) {
    std::fprintf(stderr, "step %d loss %.6f lr %.3e\n", step, loss, lr);
  }
}

void on_arm_step(const char* arm, int step, double loss, double lr, void* user) {
  const auto* p = static_cast<const Progress*>(user);
  if (p->every > 0 && step % p->every == 0) {
    std::fprintf(stderr, "[%s] step %d loss %.6f lr %.3e\n", arm, step, loss, lr);
  }
}

void on_suite(const char* name, int passed, const char* detail, double seconds, void* user) {
  std::printf("%-8s %s  (%.2fs) %s\n", name, passed ? "PASS" : "FAIL", seconds, detail);
  if (!passed) static_cast<std::string*>(user)->append(std::string(" ") + name);
}

void apply_overrides(dsea_config* cfg, int steps, long long seed) {
  if (steps >= 0) check(dsea_config_set(cfg, "steps", std::to_string(steps).c_str()), "--steps");
  if (seed >= 0) check(dsea_config_set(cfg, "seed", std::to_string(seed).c_str()), "--seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dsea: underwater image enhancement"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dsea_version());

  Progress progress;

  std::string config_path, data_dir, out_path;
  int steps = -1;
  long long seed = -1;
  auto* train = app.add_subcommand("train", "train a model from scratch");
  train->add_option("--config", config_path, "run config (key = value)")->required();
  train->add_option("--data", data_dir, "paired dataset root")->required();
  train->add_option("--out", out_path, "checkpoint path; the loss trace goes to <out>.trace")->required();
  train->add_option("--steps", steps, "override the config's step count")->check(CLI::NonNegativeNumber);
  train->add_option("--seed", seed, "override the config's seed")->check(CLI::NonNegativeNumber);
  train->add_option("--log-every", progress.every, "print progress every N steps (0 = silent)");

  std::string ckpt_path, input_path, output_path;
  auto* infer = app.add_subcommand("infer", "enhance one PNG");
  infer->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  infer->add_option("--input", input_path, "input PNG")->required();
  infer->add_option("--output", output_path, "output PNG")->required();

  std::string report_path;
  auto* eval = app.add_subcommand("eval", "PSNR/SSIM over a paired dataset");
  eval->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  eval->add_option("--data", data_dir, "paired dataset root")->required();
  eval->add_option("--report", report_path, "write `name psnr ssim` lines plus MEAN here");

  std::string fault;
  auto* selftest = app.add_subcommand("selftest", "run the numerical oracle suites");
  selftest->add_option("--inject-fault", fault, "test fixture: corrupt a suite on purpose")
      ->check(CLI::IsMember({"dct-norm"}));

  int synth_count = 20, synth_height = 64, synth_width = 64;
  long long synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "write a synthetic paired dataset");
  synth->add_option("--out", out_path, "dataset root")->required();
  synth->add_option("--count", synth_count, "number of pairs")->check(CLI::PositiveNumber);
  synth->add_option("--height", synth_height, "image height")->check(CLI::PositiveNumber);
  synth->add_option("--width", synth_width, "image width")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "generator seed")->check(CLI::NonNegativeNumber);

  std::string plan_path, train_dir, test_dir;
  auto* ablation = app.add_subcommand("ablation", "train and compare the ablation arms");
  auto* plan_opt = ablation->add_option("--plan", plan_path, "plan file with [arm NAME] sections");
  ablation->add_option("--config", config_path, "base config for the default three-arm plan")
      ->excludes(plan_opt);
  ablation->add_option("--train", train_dir, "training dataset root")->required();
  ablation->add_option("--test", test_dir, "held-out dataset root")->required();
  ablation->add_option("--out", out_path, "output directory")->required();
  ablation->add_option("--log-every", progress.every, "print progress every N steps (0 = silent)");

  std::vector<double> ratios{0.25, 0.5, 1.0};
  auto* sweep = app.add_subcommand("sweep", "pooling-ratio sweep");
  sweep->add_option("--config", config_path, "base config");
  sweep->add_option("--ratios", ratios, "pooling ratios in (0,1], must include 1.0")->delimiter(',');
  sweep->add_option("--train", train_dir, "training dataset root")->required();
  sweep->add_option("--test", test_dir, "held-out dataset root")->required();
  sweep->add_option("--out", out_path, "output directory")->required();
  sweep->add_option("--log-every", progress.every, "print progress every N steps (0 = silent)");

  auto* keys = app.add_subcommand("keys", "list run config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) {
      ConfigPtr cfg = load_config(config_path);
      apply_overrides(cfg.get(), steps, seed);
      DatasetPtr data = open_dataset(data_dir);
      check(dsea_train(cfg.get(), data.get(), out_path.c_str(), on_train_step, &progress, nullptr), "train");
      std::printf("wrote %s and %s.trace\n", out_path.c_str(), out_path.c_str());
    } else if (*infer) {
      ModelPtr model = load_model(ckpt_path);
      check(dsea_enhance_file(model.get(), input_path.c_str(), output_path.c_str()), "infer " + input_path);
    } else if (*eval) {
      ModelPtr model = load_model(ckpt_path);
      DatasetPtr data = open_dataset(data_dir);
      dsea_report* raw = nullptr;
      check(dsea_evaluate(model.get(), data.get(), &raw), "eval");
      std::unique_ptr<dsea_report, void (*)(dsea_report*)> report(raw, dsea_report_free);
      if (!report_path.empty()) {
        TextPtr lines = acquire<dsea_text, dsea_text_free>(
            [&](dsea_text** o) { return dsea_report_lines(report.get(), o); }, "report");
        std::FILE* f = std::fopen((report_path + ".tmp").c_str(), "wb");
        if (!f) {
          std::fprintf(stderr, "dsea: cannot write %s\n", report_path.c_str());
          return kExitFailure;
        }
        const std::string text = dsea_text_data(lines.get());
        const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
        if (std::fclose(f) != 0 || !ok || std::rename((report_path + ".tmp").c_str(), report_path.c_str()) != 0) {
          std::remove((report_path + ".tmp").c_str());
          std::fprintf(stderr, "dsea: cannot write %s\n", report_path.c_str());
          return kExitFailure;
        }
      }
      TextPtr table = acquire<dsea_text, dsea_text_free>(
          [&](dsea_text** o) { return dsea_report_table(report.get(), o); }, "report");
      std::fputs(dsea_text_data(table.get()), stdout);
    } else if (*selftest) {
      int all = 0;
      const unsigned flags = fault == "dct-norm" ? DSEA_SELFTEST_FAULT_DCT_NORM : 0u;
      std::string failing;
      check(dsea_selftest(flags, on_suite, &failing, &all), "selftest");
      if (!all) std::fprintf(stderr, "dsea: failing suites:%s\n", failing.c_str());
      return all ? 0 : kExitFailure;
    } else if (*synth) {
      check(dsea_synth_dataset(out_path.c_str(), synth_count, synth_height, synth_width,
                               static_cast<unsigned long long>(synth_seed)),
            "synth");
    } else if (*ablation) {
      DatasetPtr train_data = open_dataset(train_dir);
      DatasetPtr test_data = open_dataset(test_dir);
      dsea_plan* raw = nullptr;
      if (!plan_path.empty()) {
        check(dsea_plan_load(plan_path.c_str(), &raw), "plan " + plan_path);
      } else {
        ConfigPtr cfg = load_config(config_path);
        check(dsea_plan_default(cfg.get(), &raw), "plan");
      }
      std::unique_ptr<dsea_plan, void (*)(dsea_plan*)> plan(raw, dsea_plan_free);
      TextPtr table = acquire<dsea_text, dsea_text_free>(
          [&](dsea_text** o) {
            return dsea_run_ablation(plan.get(), train_data.get(), test_data.get(), out_path.c_str(),
                                     on_arm_step, &progress, o);
          },
          "ablation");
      std::fputs(dsea_text_data(table.get()), stdout);
    } else if (*sweep) {
      ConfigPtr cfg = load_config(config_path);
      DatasetPtr train_data = open_dataset(train_dir);
      DatasetPtr test_data = open_dataset(test_dir);
      TextPtr table = acquire<dsea_text, dsea_text_free>(
          [&](dsea_text** o) {
            return dsea_run_pooling_sweep(cfg.get(), ratios.data(), ratios.size(), train_data.get(),
                                          test_data.get(), out_path.c_str(), on_arm_step, &progress, o);
          },
          "sweep");
      std::fputs(dsea_text_data(table.get()), stdout);
    } else if (*keys) {
      for (size_t i = 0; i < dsea_config_key_count(); ++i) {
        const char* name = nullptr;
        const char* desc = nullptr;
        dsea_config_key(i, &name, &desc);
        std::printf("%-18s %s\n", name, desc);
      }
    }
  } catch (const CommandFailure& f) {
    return f.code;
  }
  return 0;
}
