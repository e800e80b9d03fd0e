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

#ifndef NUGAN_MODEL_CONFIG_H_
#define NUGAN_MODEL_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

namespace nugan::model {

struct GeneratorConfig {
  int n_layers = 6;
  int d_model = 512;
  int n_heads = 8;
  int d_ff = 2048;
  int in_bins = 257;
  int out_bins = 256;
  // Positional-encoding horizon; longer inputs must be chunked by the caller.
  int max_frames = 1024;

  void Validate() const;
};

struct DiscriminatorConfig {
  std::vector<int> group_counts{1, 4, 16, 64, 256};
  int channels = 512;
  int n_layers = 4;
  int kernel = 4;
  int stride = 2;
  int in_bins = 513;
  // Power iterations run once at initialization to seed each u vector.
  int sn_warmup_iterations = 30;

  void Validate() const;
};

struct ModelConfig {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;

  void Validate() const;
};

// Reduced widths for desktop CPUs: d_model 128, channels 128. The finest
// discriminator uses one channel per group (128) because 256 groups cannot
// partition 128 channels.
ModelConfig DeskModelConfig();

// `section.key = value` lines, stable order. Parse() accepts exactly the keys
// Serialize() emits and throws ConfigError on anything else.
std::string SerializeModelConfig(const ModelConfig& config);
ModelConfig ParseModelConfig(const std::string& text);

// FNV-1a over SerializeModelConfig().
std::uint64_t ModelConfigDigest(const ModelConfig& config);

std::string FormatGroupCounts(const std::vector<int>& groups);
std::vector<int> ParseGroupCounts(const std::string& text);

}  // namespace nugan::model

#endif  // NUGAN_MODEL_CONFIG_H_
