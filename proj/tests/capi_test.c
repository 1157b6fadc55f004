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

/* Exercises the public C API from plain C. */
#define _POSIX_C_SOURCE 200809L
#include <dsea/dsea.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <unistd.h>

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: CHECK failed: %s (%s)\n", __FILE__,     \
              __LINE__, #cond, dsea_last_error());                    \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static int steps_seen = 0;
static void on_step(int step, double loss, double lr, void* user) {
  (void)user;
  CHECK(step == steps_seen);
  CHECK(isfinite(loss) && lr > 0.0);
  ++steps_seen;
}

static int suites = 0;
static void on_suite(const char* name, int passed, const char* detail, double seconds, void* user) {
  (void)detail;
  (void)seconds;
  (void)user;
  if (strcmp(name, "dct") == 0) CHECK(!passed);
  ++suites;
}

int main(void) {
  char root[] = "/tmp/dsea_capi_XXXXXX";
  if (!mkdtemp(root)) return 1;
  char path[512], path2[512];

  CHECK(strcmp(dsea_version(), "0.1.0") == 0);
  CHECK(strcmp(dsea_status_name(DSEA_ERR_CONFIG), "config error") == 0);

  /* Config handles. */
  dsea_config* cfg = NULL;
  CHECK(dsea_config_default(&cfg) == DSEA_OK);
  CHECK(dsea_config_set(cfg, "bogus", "1") == DSEA_ERR_CONFIG);
  CHECK(strstr(dsea_last_error(), "bogus") != NULL);
  CHECK(dsea_config_set(cfg, "base_width", "8") == DSEA_OK);
  CHECK(dsea_config_set(cfg, "patch", "16") == DSEA_OK);
  CHECK(dsea_config_set(cfg, "batch", "2") == DSEA_OK);
  CHECK(dsea_config_set(cfg, "steps", "3") == DSEA_OK);
  CHECK(dsea_config_set(cfg, "base_width", "12") == DSEA_ERR_CONFIG);
  dsea_text* text = NULL;
  CHECK(dsea_config_format(cfg, &text) == DSEA_OK);
  CHECK(strstr(dsea_text_data(text), "base_width = 8") != NULL);
  dsea_text_free(text);
  CHECK(dsea_config_key_count() == 18);
  const char* key = NULL;
  const char* desc = NULL;
  CHECK(dsea_config_key(0, &key, &desc) == DSEA_OK && strcmp(key, "base_width") == 0);
  CHECK(dsea_config_key(18, &key, &desc) == DSEA_ERR_INVALID_ARGUMENT);
  dsea_config* parsed = NULL;
  CHECK(dsea_config_parse("steps = x\n", &parsed) == DSEA_ERR_CONFIG && parsed == NULL);
  CHECK(dsea_config_default(NULL) == DSEA_ERR_INVALID_ARGUMENT);

  /* Data. */
  snprintf(path, sizeof path, "%s/data", root);
  CHECK(dsea_synth_dataset(path, 3, 20, 20, 1) == DSEA_OK);
  dsea_dataset* data = NULL;
  CHECK(dsea_dataset_open(path, &data) == DSEA_OK);
  size_t n = 0;
  CHECK(dsea_dataset_size(data, &n) == DSEA_OK && n == 3);
  dsea_dataset* missing = NULL;
  snprintf(path2, sizeof path2, "%s/none", root);
  CHECK(dsea_dataset_open(path2, &missing) == DSEA_ERR_DATA && missing == NULL);

  /* Train, save, load. */
  dsea_model* model = NULL;
  snprintf(path, sizeof path, "%s/m.ckpt", root);
  CHECK(dsea_train(cfg, data, path, on_step, NULL, &model) == DSEA_OK);
  CHECK(steps_seen == 3);
  size_t tensors = 0, elements = 0;
  CHECK(dsea_model_tensor_count(model, &tensors) == DSEA_OK && tensors == 205);
  CHECK(dsea_model_element_count(model, &elements) == DSEA_OK && elements > 0);
  dsea_model* loaded = NULL;
  CHECK(dsea_model_load(path, &loaded) == DSEA_OK);
  snprintf(path2, sizeof path2, "%s/bad.ckpt", root);
  FILE* f = fopen(path2, "wb");
  fputs("DSEA nonsense", f);
  fclose(f);
  dsea_model* bad = NULL;
  CHECK(dsea_model_load(path2, &bad) == DSEA_ERR_LOAD && bad == NULL);

  /* Inference on raw floats. */
  float in[3 * 5 * 7], out[3 * 5 * 7];
  for (int i = 0; i < 3 * 5 * 7; ++i) in[i] = (float)(i % 11) / 10.0f;
  CHECK(dsea_enhance(loaded, in, 5, 7, out) == DSEA_OK);
  for (int i = 0; i < 3 * 5 * 7; ++i) CHECK(out[i] >= 0.0f && out[i] <= 1.0f);
  CHECK(dsea_enhance(loaded, in, 0, 7, out) == DSEA_ERR_INVALID_ARGUMENT);

  /* Evaluation report. */
  dsea_report* report = NULL;
  CHECK(dsea_evaluate(loaded, data, &report) == DSEA_OK);
  size_t rows = 0;
  CHECK(dsea_report_size(report, &rows) == DSEA_OK && rows == 3);
  const char* name = NULL;
  double p = 0, s = 0, mp = 0, ms = 0, sum_p = 0;
  for (size_t i = 0; i < rows; ++i) {
    CHECK(dsea_report_row(report, i, &name, &p, &s) == DSEA_OK);
    sum_p += p;
  }
  CHECK(dsea_report_mean(report, &mp, &ms) == DSEA_OK);
  CHECK(fabs(mp - sum_p / 3) < 1e-9);
  CHECK(dsea_report_lines(report, &text) == DSEA_OK);
  CHECK(strstr(dsea_text_data(text), "MEAN") != NULL);
  dsea_text_free(text);
  dsea_report_free(report);

  /* Selftest with an injected fault reports the dct suite. */
  int all = 1;
  CHECK(dsea_selftest(DSEA_SELFTEST_FAULT_DCT_NORM, on_suite, NULL, &all) == DSEA_OK);
  CHECK(all == 0);
  CHECK(suites >= 5);

  dsea_model_free(bad);
  dsea_model_free(loaded);
  dsea_model_free(model);
  dsea_dataset_free(data);
  dsea_config_free(cfg);
  dsea_config_free(NULL);

  snprintf(path, sizeof path, "rm -rf %s", root);
  if (system(path) != 0) ++failures;
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
