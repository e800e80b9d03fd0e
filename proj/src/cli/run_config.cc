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

#include "nugan/cli/run_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "nugan/errors.h"

namespace nugan::cli {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename N>
N ParseNumber(const std::string& key, const std::string& text) {
  const std::string t = Trim(text);
  N value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return value;
}

struct Field {
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

template <typename N>
Field NumberField(const std::string& key, N& ref) {
  return {[&ref] { return fmt::format("{}", ref); },
          [&ref, key](const std::string& v) { ref = ParseNumber<N>(key, v); }};
}

Field StringField(std::string& ref) {
  return {[&ref] { return ref; }, [&ref](const std::string& v) { ref = Trim(v); }};
}

// Keyed "section.key", in serialization order.
std::vector<std::pair<std::string, Field>> Fields(RunConfig& c) {
  std::vector<std::pair<std::string, Field>> f;
  auto num = [&f](const std::string& key, auto& ref) {
    f.emplace_back(key, NumberField(key, ref));
  };
  f.emplace_back("run.run_dir", StringField(c.run_dir));

  f.emplace_back("data.corpus", StringField(c.data.corpus));
  f.emplace_back("data.heldout_tag", StringField(c.data.heldout_tag));
  num("data.heldout_fraction", c.data.heldout_fraction);
  num("data.split_seed", c.data.split_seed);
  num("data.synth_seed", c.data.synth_seed);
  num("data.synth_files", c.data.synth_files);
  num("data.synth_duration", c.data.synth_duration);

  auto& g = c.model.generator;
  num("generator.n_layers", g.n_layers);
  num("generator.d_model", g.d_model);
  num("generator.n_heads", g.n_heads);
  num("generator.d_ff", g.d_ff);
  num("generator.in_bins", g.in_bins);
  num("generator.out_bins", g.out_bins);
  num("generator.max_frames", g.max_frames);

  auto& d = c.model.discriminator;
  f.emplace_back("discriminator.group_counts",
                 Field{[&d] { return model::FormatGroupCounts(d.group_counts); },
                       [&d](const std::string& v) {
                         d.group_counts = model::ParseGroupCounts(Trim(v));
                       }});
  num("discriminator.channels", d.channels);
  num("discriminator.n_layers", d.n_layers);
  num("discriminator.kernel", d.kernel);
  num("discriminator.stride", d.stride);
  num("discriminator.in_bins", d.in_bins);
  num("discriminator.sn_warmup_iterations", d.sn_warmup_iterations);

  auto& t = c.train;
  num("train.lr_g", t.lr_g);
  num("train.lr_d", t.lr_d);
  num("train.beta1", t.beta1);
  num("train.beta2", t.beta2);
  num("train.eps", t.eps);
  num("train.lambda_fm", t.lambda_fm);
  num("train.batch_frames", t.batch_frames);
  num("train.batch_size", t.batch_size);
  num("train.max_steps", t.max_steps);
  num("train.seed", t.seed);
  num("train.checkpoint_interval", t.checkpoint_interval);
  num("train.grad_clip", t.grad_clip);

  num("lsd.n_fft", c.lsd.n_fft);
  num("lsd.hop", c.lsd.hop);
  f.emplace_back("lsd.window", Field{[] { return std::string("hann"); },
                                     [](const std::string& v) {
                                       if (Trim(v) != "hann") {
                                         throw ConfigError("lsd.window must be hann, got '" +
                                                           v + "'");
                                       }
                                     }});
  num("lsd.power_floor", c.lsd.power_floor);
  return f;
}

void Assign(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "run.preset") {
    throw ConfigError("run.preset can only be set at the top of a config file or with --preset");
  }
  for (auto& [name, field] : Fields(config)) {
    if (name == key) {
      field.set(value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void ResolveRunDir(RunConfig& config) {
  if (!config.run_dir.empty()) return;
  const char* env = std::getenv(kRunDirEnv);
  config.run_dir = (env != nullptr && *env != '\0') ? env : "runs/default";
}

}  // namespace

std::vector<std::string> PresetNames() { return {"full", "desk"}; }

RunConfig PresetConfig(const std::string& name) {
  RunConfig config;
  config.preset = name;
  if (name == "full") return config;
  if (name == "desk") {
    config.model = model::DeskModelConfig();
    config.train.batch_size = 4;
    config.train.batch_frames = 64;
    config.train.max_steps = 1000;
    config.train.checkpoint_interval = 250;
    return config;
  }
  throw ConfigError("unknown preset '" + name + "' (expected full or desk)");
}

void ApplyOverride(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  }
  Assign(config, Trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig ParseRunConfig(const std::string& text, const std::vector<std::string>& overrides,
                         const std::string& preset_override) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  std::string preset = preset_override;
  if (preset.empty()) preset = Trim(tree.get<std::string>("run.preset", "full"));
  RunConfig config = PresetConfig(preset);

  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config key '" + section + "' is outside any [section]");
    }
    for (const auto& [key, value] : body) {
      if (!value.empty()) {
        throw ConfigError("config key '" + section + "." + key + "' has nested values");
      }
      const std::string full = section + "." + key;
      if (full == "run.preset") continue;
      Assign(config, full, value.data());
    }
  }
  for (const auto& o : overrides) ApplyOverride(config, o);
  ResolveRunDir(config);
  ValidateRunConfig(config);
  return config;
}

RunConfig LoadRunConfig(const std::string& path, const std::vector<std::string>& overrides,
                        const std::string& preset_override) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  return ParseRunConfig(text, overrides, preset_override);
}

std::string SerializeRunConfig(const RunConfig& config) {
  RunConfig copy = config;
  std::string out = "[run]\npreset = " + copy.preset + "\n";
  std::string section = "run";
  for (auto& [name, field] : Fields(copy)) {
    const auto dot = name.find('.');
    const auto sec = name.substr(0, dot);
    if (sec != section) {
      out += "\n[" + sec + "]\n";
      section = sec;
    }
    out += name.substr(dot + 1) + " = " + field.get() + "\n";
  }
  return out;
}

void ValidateRunConfig(const RunConfig& config) {
  config.model.Validate();
  config.train.Validate();
  if (config.model.discriminator.in_bins !=
      config.model.generator.in_bins + config.model.generator.out_bins) {
    throw ConfigError("discriminator.in_bins must equal generator.in_bins + out_bins");
  }
  if (config.lsd.n_fft < 2 || config.lsd.hop <= 0 || !(config.lsd.power_floor > 0.0)) {
    throw ConfigError("lsd needs n_fft >= 2, hop > 0, power_floor > 0");
  }
  const auto& d = config.data;
  if (d.corpus.empty()) throw ConfigError("data.corpus is empty");
  if (!(d.heldout_fraction > 0.0 && d.heldout_fraction < 1.0)) {
    throw ConfigError("data.heldout_fraction must be in (0, 1)");
  }
  if (d.synth_files < 2) throw ConfigError("data.synth_files must be >= 2");
  if (!(d.synth_duration * dsp::kHighSampleRate >= dsp::kNumFft)) {
    throw ConfigError("data.synth_duration must cover at least one STFT frame");
  }
}

}  // namespace nugan::cli
