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

#ifndef NUGAN_CLI_RUN_CONFIG_H_
#define NUGAN_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nugan/metrics.h"
#include "nugan/model/config.h"
#include "nugan/training/trainer.h"

namespace nugan::cli {

// Value of the corpus field that selects the built-in synthetic corpus.
inline constexpr const char* kSynthCorpus = "synth";
inline constexpr const char* kRunDirEnv = "NUGAN_RUN_DIR";

struct DataSettings {
  // Manifest path, or "synth".
  std::string corpus = kSynthCorpus;
  // Non-empty: held-out files are those whose path contains the tag.
  // Otherwise a manifest split column is used when every entry has one, and
  // a seeded fraction split when not.
  std::string heldout_tag;
  double heldout_fraction = 1.0 / 6.0;
  std::uint64_t split_seed = 0;
  std::uint64_t synth_seed = 0;
  int synth_files = 60;
  double synth_duration = 2.0;
};

struct RunConfig {
  std::string preset = "full";
  std::string run_dir;  // defaults to $NUGAN_RUN_DIR, then "runs/default"
  model::ModelConfig model;
  training::TrainConfig train;
  metrics::LsdConfig lsd;
  DataSettings data;
};

// Known presets: "full" (full widths) and "desk" (reduced widths and
// batches for a desktop CPU).
RunConfig PresetConfig(const std::string& name);
std::vector<std::string> PresetNames();

// Sectioned `key = value` text. `run.preset` is applied first, then every
// other key in the file, then `overrides` ("section.key=value"). Unknown
// sections or keys and malformed values throw ConfigError.
RunConfig LoadRunConfig(const std::string& path, const std::vector<std::string>& overrides,
                        const std::string& preset_override = "");
RunConfig ParseRunConfig(const std::string& text, const std::vector<std::string>& overrides,
                         const std::string& preset_override = "");

// Applies one `section.key=value` assignment.
void ApplyOverride(RunConfig& config, const std::string& assignment);

// Every field, sectioned; ParseRunConfig(SerializeRunConfig(c), {}) == c.
std::string SerializeRunConfig(const RunConfig& config);

void ValidateRunConfig(const RunConfig& config);

}  // namespace nugan::cli

#endif  // NUGAN_CLI_RUN_CONFIG_H_
