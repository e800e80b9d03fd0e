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

#include "nugan/model/config.h"

#include <map>
#include <sstream>
#include <string>

#include "nugan/errors.h"

namespace nugan::model {
namespace {

void Require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int ToInt(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

}  // namespace

void GeneratorConfig::Validate() const {
  Require(n_layers >= 1, "generator.n_layers must be >= 1");
  Require(d_model >= 1 && n_heads >= 1, "generator.d_model and n_heads must be >= 1");
  Require(d_model % n_heads == 0, "generator.d_model (" + std::to_string(d_model) +
                                      ") must be divisible by n_heads (" +
                                      std::to_string(n_heads) + ")");
  Require(d_ff >= 1, "generator.d_ff must be >= 1");
  Require(in_bins + out_bins == 513, "generator.in_bins + out_bins must be 513, got " +
                                         std::to_string(in_bins + out_bins));
  Require(in_bins >= 1 && out_bins >= 1, "generator bin counts must be >= 1");
  Require(max_frames >= 1, "generator.max_frames must be >= 1");
}

void DiscriminatorConfig::Validate() const {
  Require(!group_counts.empty(), "discriminator.group_counts is empty");
  Require(channels >= 1, "discriminator.channels must be >= 1");
  for (int g : group_counts) {
    Require(g >= 1 && channels % g == 0,
            "discriminator.channels (" + std::to_string(channels) +
                ") must be divisible by every group count, got " + std::to_string(g));
  }
  Require(n_layers >= 1, "discriminator.n_layers must be >= 1");
  Require(kernel >= 1 && stride >= 1, "discriminator kernel and stride must be >= 1");
  Require(kernel >= stride && (kernel - stride) % 2 == 0,
          "discriminator kernel - stride must be even and non-negative");
  Require(in_bins >= 1, "discriminator.in_bins must be >= 1");
  Require(sn_warmup_iterations >= 0, "discriminator.sn_warmup_iterations must be >= 0");
}

void ModelConfig::Validate() const {
  generator.Validate();
  discriminator.Validate();
  Require(generator.in_bins + generator.out_bins == discriminator.in_bins,
          "discriminator.in_bins must equal generator in_bins + out_bins");
}

ModelConfig DeskModelConfig() {
  ModelConfig config;
  config.generator.d_model = 128;
  config.generator.n_heads = 4;
  config.generator.d_ff = 512;
  config.discriminator.channels = 128;
  config.discriminator.group_counts = {1, 4, 16, 64, 128};
  return config;
}

std::string FormatGroupCounts(const std::vector<int>& groups) {
  std::string out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(groups[i]);
  }
  return out;
}

std::vector<int> ParseGroupCounts(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(ToInt("group_counts", Trim(item)));
  if (out.empty()) throw ConfigError("group_counts: empty list");
  return out;
}

std::string SerializeModelConfig(const ModelConfig& c) {
  std::ostringstream out;
  out << "generator.n_layers = " << c.generator.n_layers << "\n"
      << "generator.d_model = " << c.generator.d_model << "\n"
      << "generator.n_heads = " << c.generator.n_heads << "\n"
      << "generator.d_ff = " << c.generator.d_ff << "\n"
      << "generator.in_bins = " << c.generator.in_bins << "\n"
      << "generator.out_bins = " << c.generator.out_bins << "\n"
      << "generator.max_frames = " << c.generator.max_frames << "\n"
      << "discriminator.group_counts = " << FormatGroupCounts(c.discriminator.group_counts)
      << "\n"
      << "discriminator.channels = " << c.discriminator.channels << "\n"
      << "discriminator.n_layers = " << c.discriminator.n_layers << "\n"
      << "discriminator.kernel = " << c.discriminator.kernel << "\n"
      << "discriminator.stride = " << c.discriminator.stride << "\n"
      << "discriminator.in_bins = " << c.discriminator.in_bins << "\n"
      << "discriminator.sn_warmup_iterations = " << c.discriminator.sn_warmup_iterations
      << "\n";
  return out.str();
}

ModelConfig ParseModelConfig(const std::string& text) {
  ModelConfig c;
  std::map<std::string, int*> ints{
      {"generator.n_layers", &c.generator.n_layers},
      {"generator.d_model", &c.generator.d_model},
      {"generator.n_heads", &c.generator.n_heads},
      {"generator.d_ff", &c.generator.d_ff},
      {"generator.in_bins", &c.generator.in_bins},
      {"generator.out_bins", &c.generator.out_bins},
      {"generator.max_frames", &c.generator.max_frames},
      {"discriminator.channels", &c.discriminator.channels},
      {"discriminator.n_layers", &c.discriminator.n_layers},
      {"discriminator.kernel", &c.discriminator.kernel},
      {"discriminator.stride", &c.discriminator.stride},
      {"discriminator.in_bins", &c.discriminator.in_bins},
      {"discriminator.sn_warmup_iterations", &c.discriminator.sn_warmup_iterations},
  };
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model config: missing '=' in '" + line + "'");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key == "discriminator.group_counts") {
      c.discriminator.group_counts = ParseGroupCounts(value);
    } else if (auto it = ints.find(key); it != ints.end()) {
      *it->second = ToInt(key, value);
    } else {
      throw ConfigError("model config: unknown key '" + key + "'");
    }
  }
  c.Validate();
  return c;
}

std::uint64_t ModelConfigDigest(const ModelConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : SerializeModelConfig(config)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace nugan::model
