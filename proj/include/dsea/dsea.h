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

/*
 * C interface to the dsea underwater image enhancement library.
 *
 * Every fallible call returns a dsea_status. On failure the calling thread's
 * last-error message describes the problem until its next failing call.
 * Objects are opaque handles released with the matching *_free function;
 * passing NULL to a *_free function is a no-op.
 */
#ifndef DSEA_DSEA_H_
#define DSEA_DSEA_H_

#include <stddef.h>

#if defined(_WIN32)
#define DSEA_API __declspec(dllexport)
#else
#define DSEA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsea_status {
  DSEA_OK = 0,
  DSEA_ERR_INVALID_ARGUMENT = 1, /* NULL handle or out-pointer, bad range */
  DSEA_ERR_SHAPE = 2,
  DSEA_ERR_PARAMETER = 3,
  DSEA_ERR_CONTRACT = 4,
  DSEA_ERR_STATE = 5,
  DSEA_ERR_CONFIG = 6,  /* unknown key, malformed value, invalid combination */
  DSEA_ERR_DECODE = 7,  /* malformed PNG */
  DSEA_ERR_LOAD = 8,    /* checkpoint rejected */
  DSEA_ERR_DATA = 9,    /* dataset pairing or readability */
  DSEA_ERR_NUMERIC = 10, /* non-finite loss or parameter */
  DSEA_ERR_IO = 11,
  DSEA_ERR_INTERNAL = 12
} dsea_status;

DSEA_API const char* dsea_version(void);
DSEA_API const char* dsea_status_name(dsea_status status);
/* Message of the calling thread's most recent failure, or "" if none. */
DSEA_API const char* dsea_last_error(void);

/* ---- owned text ---- */
typedef struct dsea_text dsea_text;
DSEA_API const char* dsea_text_data(const dsea_text* text);
DSEA_API void dsea_text_free(dsea_text* text);

/* ---- run configuration (flat key = value) ---- */
typedef struct dsea_config dsea_config;
DSEA_API dsea_status dsea_config_default(dsea_config** out);
DSEA_API dsea_status dsea_config_parse(const char* text, dsea_config** out);
DSEA_API dsea_status dsea_config_load(const char* path, dsea_config** out);
/* Sets one key; the whole config is revalidated. */
DSEA_API dsea_status dsea_config_set(dsea_config* cfg, const char* key, const char* value);
DSEA_API dsea_status dsea_config_format(const dsea_config* cfg, dsea_text** out);
/* Number of documented keys and the i-th key's name and description. */
DSEA_API size_t dsea_config_key_count(void);
DSEA_API dsea_status dsea_config_key(size_t index, const char** name, const char** description);
DSEA_API void dsea_config_free(dsea_config* cfg);

/* ---- paired dataset: <root>/input/NAME.png with <root>/target/NAME.png ---- */
typedef struct dsea_dataset dsea_dataset;
DSEA_API dsea_status dsea_dataset_open(const char* root, dsea_dataset** out);
DSEA_API dsea_status dsea_dataset_size(const dsea_dataset* data, size_t* out);
DSEA_API void dsea_dataset_free(dsea_dataset* data);
/* Writes `count` synthetic degraded/clean pairs of height x width under root. */
DSEA_API dsea_status dsea_synth_dataset(const char* root, int count, int height, int width,
                                        unsigned long long seed);

/* ---- model: architecture config plus parameters ---- */
typedef struct dsea_model dsea_model;
DSEA_API dsea_status dsea_model_create(const dsea_config* cfg, dsea_model** out);
DSEA_API dsea_status dsea_model_load(const char* path, dsea_model** out);
DSEA_API dsea_status dsea_model_save(const dsea_model* model, const char* path);
DSEA_API dsea_status dsea_model_tensor_count(const dsea_model* model, size_t* out);
DSEA_API dsea_status dsea_model_element_count(const dsea_model* model, size_t* out);
DSEA_API void dsea_model_free(dsea_model* model);

/* Enhances a planar RGB image (3 x height x width floats in [0,1]). Any extent
 * is accepted; the output has the input's extent and is clamped to [0,1]. */
DSEA_API dsea_status dsea_enhance(const dsea_model* model, const float* input, int height,
                                  int width, float* output);
DSEA_API dsea_status dsea_enhance_file(const dsea_model* model, const char* input_png,
                                       const char* output_png);

/* ---- training ---- */
typedef void (*dsea_step_fn)(int step, double loss, double lr, void* user);
/* Trains from scratch. Writes the checkpoint to out_path and the loss trace
 * (`step loss lr` per line) to out_path + ".trace". model_out may be NULL. */
DSEA_API dsea_status dsea_train(const dsea_config* cfg, const dsea_dataset* data,
                                const char* out_path, dsea_step_fn on_step, void* user,
                                dsea_model** model_out);

/* ---- evaluation ---- */
typedef struct dsea_report dsea_report;
DSEA_API dsea_status dsea_evaluate(const dsea_model* model, const dsea_dataset* data,
                                   dsea_report** out);
DSEA_API dsea_status dsea_report_size(const dsea_report* report, size_t* rows);
DSEA_API dsea_status dsea_report_row(const dsea_report* report, size_t index, const char** name,
                                     double* psnr, double* ssim);
DSEA_API dsea_status dsea_report_mean(const dsea_report* report, double* psnr, double* ssim);
/* `name psnr ssim` per image followed by a MEAN line. */
DSEA_API dsea_status dsea_report_lines(const dsea_report* report, dsea_text** out);
DSEA_API dsea_status dsea_report_table(const dsea_report* report, dsea_text** out);
DSEA_API void dsea_report_free(dsea_report* report);

/* ---- self test ---- */
#define DSEA_SELFTEST_FAULT_DCT_NORM 1u
typedef void (*dsea_suite_fn)(const char* name, int passed, const char* detail, double seconds,
                              void* user);
DSEA_API dsea_status dsea_selftest(unsigned flags, dsea_suite_fn on_suite, void* user,
                                   int* all_passed);

/* ---- experiments ---- */
typedef struct dsea_plan dsea_plan;
DSEA_API dsea_status dsea_plan_load(const char* path, dsea_plan** out);
/* baseline, +DFESA and +DFESA+SFM arms over a shared base config. */
DSEA_API dsea_status dsea_plan_default(const dsea_config* base, dsea_plan** out);
DSEA_API void dsea_plan_free(dsea_plan* plan);

typedef void (*dsea_arm_step_fn)(const char* arm, int step, double loss, double lr, void* user);
DSEA_API dsea_status dsea_run_ablation(const dsea_plan* plan, const dsea_dataset* train,
                                       const dsea_dataset* test, const char* out_dir,
                                       dsea_arm_step_fn on_step, void* user, dsea_text** table);
DSEA_API dsea_status dsea_run_pooling_sweep(const dsea_config* base, const double* ratios,
                                            size_t count, const dsea_dataset* train,
                                            const dsea_dataset* test, const char* out_dir,
                                            dsea_arm_step_fn on_step, void* user,
                                            dsea_text** table);

#ifdef __cplusplus
}
#endif

#endif /* DSEA_DSEA_H_ */
