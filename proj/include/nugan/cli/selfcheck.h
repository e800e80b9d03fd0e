// Copyright 2026 The nugan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NUGAN_CLI_SELFCHECK_H_
#define NUGAN_CLI_SELFCHECK_H_

#include <string>
#include <vector>

namespace nugan::cli {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelfCheckOptions {
  // Negative control: scales every backward seed so "gradcheck" must fail.
  bool corrupt_gradient = false;
};

// Suites: gradcheck, stft, sinc, lsd, spectral_norm, group_independence.
std::vector<SuiteResult> RunSelfCheck(const SelfCheckOptions& options = {});

}  // namespace nugan::cli

#endif  // NUGAN_CLI_SELFCHECK_H_
