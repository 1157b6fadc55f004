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

#include "dsea/dsea.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "checkpoint.hpp"
#include "experiments.hpp"
#include "inference.hpp"
#include "png.hpp"
#include "run_config.hpp"
#include "selftest.hpp"
#include "synth.hpp"
#include "trainer.hpp"

struct dsea_text {
  std::string value;
};

struct dsea_config {
  dsea::TrainConfig value;
};

struct dsea_dataset {
  dsea::Dataset value;
};

struct dsea_model {
  dsea::ModelConfig config;
  dsea::ParamStore<float> params;
};

struct dsea_report {
  dsea::MetricReport value;
};

struct dsea_plan {
  dsea::ExperimentPlan value;
};

namespace {

thread_local std::string g_last_error;

dsea_status fail(dsea_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating the exception hierarchy into status codes.
template <typename Fn>
dsea_status guard(Fn&& body) {
  try {
    body();
    return DSEA_OK;
  } catch (const dsea::ShapeError& e) {
    return fail(DSEA_ERR_SHAPE, e.what());
  } catch (const dsea::ParameterError& e) {
    return fail(DSEA_ERR_PARAMETER, e.what());
  } catch (const dsea::ContractError& e) {
    return fail(DSEA_ERR_CONTRACT, e.what());
  } catch (const dsea::StateError& e) {
    return fail(DSEA_ERR_STATE, e.what());
  } catch (const dsea::ConfigError& e) {
    return fail(DSEA_ERR_CONFIG, e.what());
  } catch (const dsea::DecodeError& e) {
    return fail(DSEA_ERR_DECODE, e.what());
  } catch (const dsea::LoadError& e) {
    return fail(DSEA_ERR_LOAD, e.what());
  } catch (const dsea::DataError& e) {
    return fail(DSEA_ERR_DATA, e.what());
  } catch (const dsea::NumericError& e) {
    return fail(DSEA_ERR_NUMERIC, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(DSEA_ERR_IO, e.what());
  } catch (const dsea::Error& e) {
    return fail(DSEA_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DSEA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DSEA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DSEA_ERR_INTERNAL, "unknown exception");
  }
}

#define DSEA_REQUIRE(cond)                                                          \
  do {                                                                              \
    if (!(cond)) return fail(DSEA_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

template <typename H, typename... Args>
dsea_status emit(H** out, Args&&... args) {
  *out = new H{std::forward<Args>(args)...};
  return DSEA_OK;
}

}  // namespace

extern "C" {

const char* dsea_version(void) { return "0.1.0"; }

const char* dsea_status_name(dsea_status status) {
  switch (status) {
    case DSEA_OK: return "ok";
    case DSEA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DSEA_ERR_SHAPE: return "shape error";
    case DSEA_ERR_PARAMETER: return "parameter error";
    case DSEA_ERR_CONTRACT: return "contract error";
    case DSEA_ERR_STATE: return "state error";
    case DSEA_ERR_CONFIG: return "config error";
    case DSEA_ERR_DECODE: return "decode error";
    case DSEA_ERR_LOAD: return "load error";
    case DSEA_ERR_DATA: return "data error";
    case DSEA_ERR_NUMERIC: return "numeric error";
    case DSEA_ERR_IO: return "i/o error";
    case DSEA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dsea_last_error(void) { return g_last_error.c_str(); }

const char* dsea_text_data(const dsea_text* text) { return text ? text->value.c_str() : ""; }
void dsea_text_free(dsea_text* text) { delete text; }

dsea_status dsea_config_default(dsea_config** out) {
  DSEA_REQUIRE(out);
  return guard([&] { emit(out, dsea::TrainConfig{}); });
}

dsea_status dsea_config_parse(const char* text, dsea_config** out) {
  DSEA_REQUIRE(text && out);
  return guard([&] { emit(out, dsea::parse_run_config(text)); });
}

dsea_status dsea_config_load(const char* path, dsea_config** out) {
  DSEA_REQUIRE(path && out);
  return guard([&] { emit(out, dsea::load_run_config(path)); });
}

dsea_status dsea_config_set(dsea_config* cfg, const char* key, const char* value) {
  DSEA_REQUIRE(cfg && key && value);
  return guard([&] {
    dsea::TrainConfig next = cfg->value;
    dsea::apply_config_entry(next, {key, value, 0});
    next.validate();
    cfg->value = next;
  });
}

dsea_status dsea_config_format(const dsea_config* cfg, dsea_text** out) {
  DSEA_REQUIRE(cfg && out);
  return guard([&] { emit(out, dsea::format_run_config(cfg->value)); });
}

size_t dsea_config_key_count(void) { return dsea::run_config_keys().size(); }

dsea_status dsea_config_key(size_t index, const char** name, const char** description) {
  DSEA_REQUIRE(index < dsea::run_config_keys().size());
  const auto& k = dsea::run_config_keys()[index];
  if (name) *name = k.name;
  if (description) *description = k.description;
  return DSEA_OK;
}

void dsea_config_free(dsea_config* cfg) { delete cfg; }

dsea_status dsea_dataset_open(const char* root, dsea_dataset** out) {
  DSEA_REQUIRE(root && out);
  return guard([&] { emit(out, dsea::Dataset::load(root)); });
}

dsea_status dsea_dataset_size(const dsea_dataset* data, size_t* out) {
  DSEA_REQUIRE(data && out);
  *out = data->value.size();
  return DSEA_OK;
}

void dsea_dataset_free(dsea_dataset* data) { delete data; }

dsea_status dsea_synth_dataset(const char* root, int count, int height, int width,
                               unsigned long long seed) {
  DSEA_REQUIRE(root);
  return guard([&] { dsea::write_synthetic_dataset(root, count, height, width, seed); });
}

dsea_status dsea_model_create(const dsea_config* cfg, dsea_model** out) {
  DSEA_REQUIRE(cfg && out);
  return guard([&] { emit(out, cfg->value.model, dsea::build_model<float>(cfg->value.model)); });
}

dsea_status dsea_model_load(const char* path, dsea_model** out) {
  DSEA_REQUIRE(path && out);
  return guard([&] {
    dsea::Checkpoint ck = dsea::load_checkpoint(path);
    emit(out, ck.config, std::move(ck.params));
  });
}

dsea_status dsea_model_save(const dsea_model* model, const char* path) {
  DSEA_REQUIRE(model && path);
  return guard([&] { dsea::save_checkpoint(model->params, model->config, path); });
}

dsea_status dsea_model_tensor_count(const dsea_model* model, size_t* out) {
  DSEA_REQUIRE(model && out);
  *out = model->params.size();
  return DSEA_OK;
}

dsea_status dsea_model_element_count(const dsea_model* model, size_t* out) {
  DSEA_REQUIRE(model && out);
  *out = static_cast<size_t>(model->params.element_count());
  return DSEA_OK;
}

void dsea_model_free(dsea_model* model) { delete model; }

dsea_status dsea_enhance(const dsea_model* model, const float* input, int height, int width,
                         float* output) {
  DSEA_REQUIRE(model && input && output && height > 0 && width > 0);
  return guard([&] {
    const std::size_t n = 3 * static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    const auto img = dsea::Tensor<float>::from_values({3, height, width}, std::vector<float>(input, input + n));
    const auto pred = dsea::enhance_image(model->params, model->config, img);
    std::memcpy(output, pred.data().data(), n * sizeof(float));
  });
}

dsea_status dsea_enhance_file(const dsea_model* model, const char* input_png, const char* output_png) {
  DSEA_REQUIRE(model && input_png && output_png);
  return guard([&] {
    const auto img = dsea::read_png(input_png);
    dsea::write_png(output_png, dsea::enhance_image(model->params, model->config, img));
  });
}

dsea_status dsea_train(const dsea_config* cfg, const dsea_dataset* data, const char* out_path,
                       dsea_step_fn on_step, void* user, dsea_model** model_out) {
  DSEA_REQUIRE(cfg && data);
  return guard([&] {
    dsea::StepCallback cb;
    if (on_step) {
      cb = [&](const dsea::TraceRow& r, const dsea::ParamStore<float>&) { on_step(r.step, r.loss, r.lr, user); };
    }
    dsea::TrainResult result =
        dsea::train(cfg->value, data->value, out_path ? std::filesystem::path(out_path) : std::filesystem::path(), cb);
    if (model_out) emit(model_out, cfg->value.model, std::move(result.params));
  });
}

dsea_status dsea_evaluate(const dsea_model* model, const dsea_dataset* data, dsea_report** out) {
  DSEA_REQUIRE(model && data && out);
  return guard([&] { emit(out, dsea::evaluate(model->params, model->config, data->value)); });
}

dsea_status dsea_report_size(const dsea_report* report, size_t* rows) {
  DSEA_REQUIRE(report && rows);
  *rows = report->value.rows.size();
  return DSEA_OK;
}

dsea_status dsea_report_row(const dsea_report* report, size_t index, const char** name, double* psnr,
                            double* ssim) {
  DSEA_REQUIRE(report && index < report->value.rows.size());
  const auto& row = report->value.rows[index];
  if (name) *name = row.name.c_str();
  if (psnr) *psnr = row.psnr_db;
  if (ssim) *ssim = row.ssim;
  return DSEA_OK;
}

dsea_status dsea_report_mean(const dsea_report* report, double* psnr, double* ssim) {
  DSEA_REQUIRE(report);
  return guard([&] {
    const auto m = report->value.mean();
    if (psnr) *psnr = m.psnr_db;
    if (ssim) *ssim = m.ssim;
  });
}

dsea_status dsea_report_lines(const dsea_report* report, dsea_text** out) {
  DSEA_REQUIRE(report && out);
  return guard([&] { emit(out, report->value.to_lines()); });
}

dsea_status dsea_report_table(const dsea_report* report, dsea_text** out) {
  DSEA_REQUIRE(report && out);
  return guard([&] { emit(out, report->value.to_table()); });
}

void dsea_report_free(dsea_report* report) { delete report; }

dsea_status dsea_selftest(unsigned flags, dsea_suite_fn on_suite, void* user, int* all_passed) {
  return guard([&] {
    dsea::SelftestOptions opts;
    opts.inject_dct_norm_fault = (flags & DSEA_SELFTEST_FAULT_DCT_NORM) != 0;
    bool ok = true;
    for (const auto& r : dsea::run_selftest(opts)) {
      ok = ok && r.passed;
      if (on_suite) on_suite(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

dsea_status dsea_plan_load(const char* path, dsea_plan** out) {
  DSEA_REQUIRE(path && out);
  return guard([&] { emit(out, dsea::load_plan(path)); });
}

dsea_status dsea_plan_default(const dsea_config* base, dsea_plan** out) {
  DSEA_REQUIRE(base && out);
  return guard([&] { emit(out, dsea::default_ablation_plan(base->value)); });
}

void dsea_plan_free(dsea_plan* plan) { delete plan; }

namespace {

dsea::ArmProgress arm_progress(dsea_arm_step_fn on_step, void* user) {
  if (!on_step) return {};
  return [=](const std::string& arm, const dsea::TraceRow& r) { on_step(arm.c_str(), r.step, r.loss, r.lr, user); };
}

}  // namespace

dsea_status dsea_run_ablation(const dsea_plan* plan, const dsea_dataset* train, const dsea_dataset* test,
                              const char* out_dir, dsea_arm_step_fn on_step, void* user, dsea_text** table) {
  DSEA_REQUIRE(plan && train && test);
  return guard([&] {
    const auto result = dsea::run_ablation(plan->value, train->value, test->value,
                                           out_dir ? std::filesystem::path(out_dir) : std::filesystem::path(),
                                           arm_progress(on_step, user));
    if (table) emit(table, result.to_text());
  });
}

dsea_status dsea_run_pooling_sweep(const dsea_config* base, const double* ratios, size_t count,
                                   const dsea_dataset* train, const dsea_dataset* test, const char* out_dir,
                                   dsea_arm_step_fn on_step, void* user, dsea_text** table) {
  DSEA_REQUIRE(base && ratios && train && test);
  return guard([&] {
    const auto result = dsea::run_pooling_sweep(std::vector<double>(ratios, ratios + count), base->value,
                                                train->value, test->value,
                                                out_dir ? std::filesystem::path(out_dir) : std::filesystem::path(),
                                                arm_progress(on_step, user));
    if (table) emit(table, result.to_text());
  });
}

}  // extern "C"
