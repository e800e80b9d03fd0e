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

#ifndef NUGAN_CLI_COMMANDS_H_
#define NUGAN_CLI_COMMANDS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nugan/cli/run_config.h"
#include "nugan/data/corpus.h"

namespace nugan::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitData = 2,
  kExitNumeric = 3,
  kExitSelfCheck = 4,
};

// Config sources shared by train and evaluate.
struct ConfigSources {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;  // section.key=value
};

struct TrainOptions {
  ConfigSources sources;
  std::optional<int> max_steps;
  std::optional<std::uint64_t> seed;
  std::string run_dir;
  std::string corpus;
  std::string resume;
};

struct UpsampleOptions {
  std::string checkpoint;
  bool bypass_model = false;
  std::string input;
  std::string output;
};

struct EvaluateOptions {
  ConfigSources sources;
  std::string checkpoint;
  bool baseline = false;
  bool oracle = false;
  std::string corpus;
  std::string heldout_tag;
};

struct CheckOptions {
  bool corrupt_gradient = false;
};

int CmdTrain(const TrainOptions& options);
int CmdUpsample(const UpsampleOptions& options);
int CmdEvaluate(const EvaluateOptions& options);
int CmdCheck(const CheckOptions& options);

// Runs `body`, mapping ConfigError to 1, DataError/DimensionError to 2 and
// NumericError to 3, each with a one-line diagnostic on stderr.
int RunGuarded(const std::function<int()>& body);

// Corpus named by the config ("synth" or a manifest), split per the data
// settings.
data::CorpusSplit LoadSplit(const RunConfig& config);

}  // namespace nugan::cli

#endif  // NUGAN_CLI_COMMANDS_H_
