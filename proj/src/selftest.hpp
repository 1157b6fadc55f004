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
#include <vector>

namespace dsea {

struct SelftestOptions {
  // Test fixture: the dct suite checks a coefficient function whose DC
  // normalization is wrong, so that suite must fail.
  bool inject_dct_norm_fault = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

SuiteResult selftest_grad();
SuiteResult selftest_fft();
SuiteResult selftest_dct(const SelftestOptions& opts = {});
SuiteResult selftest_decomp();
SuiteResult selftest_metrics();

// grad, fft, dct, decomp, metrics, in that order.
std::vector<SuiteResult> run_selftest(const SelftestOptions& opts = {});

}  // namespace dsea
