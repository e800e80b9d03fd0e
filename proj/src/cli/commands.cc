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

#include "nugan/cli/commands.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "nugan/cli/selfcheck.h"
#include "nugan/data/wav.h"
#include "nugan/errors.h"
#include "nugan/inference/upsampler.h"
#include "nugan/metrics.h"
#include "nugan/model/checkpoint.h"
#include "nugan/training/trainer.h"

namespace nugan::cli {
namespace fs = std::filesystem;

namespace {

void Echo(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::cout << "# effective configuration\n";
  while (std::getline(in, line)) std::cout << "# " << line << '\n';
  std::cout.flush();
}

RunConfig Resolve(const ConfigSources& sources, std::vector<std::string> extra) {
  auto overrides = sources.overrides;
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  return LoadRunConfig(sources.config_path, overrides, sources.preset);
}

}  // namespace

data::CorpusSplit LoadSplit(const RunConfig& config) {
  const auto& d = config.data;
  data::Corpus corpus;
  if (d.corpus == kSynthCorpus) {
    corpus = data::SynthCorpus({d.synth_seed, static_cast<std::size_t>(d.synth_files),
                                d.synth_duration, 1e-3});
  } else {
    if (!fs::exists(d.corpus)) throw DataError("corpus not found: " + d.corpus);
    corpus = data::ReadManifest(d.corpus);
    for (const auto& item : corpus.items) {
      if (!fs::exists(item.path)) throw DataError("corpus file not found: " + item.path);
    }
  }
  if (!d.heldout_tag.empty()) return data::SplitByTag(corpus, d.heldout_tag);
  const bool all_tagged = std::all_of(corpus.items.begin(), corpus.items.end(),
                                      [](const auto& item) { return item.split.has_value(); });
  if (all_tagged) return data::SplitByManifest(corpus);
  return data::SplitByFraction(corpus, d.heldout_fraction, d.split_seed);
}

int CmdTrain(const TrainOptions& options) {
  std::vector<std::string> extra;
  if (options.max_steps) extra.push_back("train.max_steps=" + std::to_string(*options.max_steps));
  if (options.seed) extra.push_back("train.seed=" + std::to_string(*options.seed));
  if (!options.run_dir.empty()) extra.push_back("run.run_dir=" + options.run_dir);
  if (!options.corpus.empty()) extra.push_back("data.corpus=" + options.corpus);
  const RunConfig config = Resolve(options.sources, extra);

  const std::string text = SerializeRunConfig(config);
  Echo(text);
  fs::create_directories(config.run_dir);
  {
    const auto path = fs::path(config.run_dir) / "config.ini";
    std::ofstream out(path);
    out << text;
    if (!out) throw DataError("cannot write " + path.string());
  }

  const auto split = LoadSplit(config);
  spdlog::info("corpus: {} train / {} held-out files", split.train.size(),
               split.heldout.size());
  const auto dataset = data::BuildDataset(split.train, split.HeldoutPaths());

  training::LoopOptions loop;
  loop.run_dir = config.run_dir;
  if (!options.resume.empty()) loop.resume_from = options.resume;
  loop.on_step = [&config](const training::StepReport& r) {
    if (r.step % 50 == 0 || r.step == config.train.max_steps) {
      spdlog::info("step {}/{} d_loss={:.4f} g_adv={:.4f} g_fm={:.4f}", r.step,
                   config.train.max_steps, r.d_loss, r.g_adv, r.g_fm);
    }
  };
  const auto final_path = training::TrainLoop(dataset, config.model, config.train, loop);
  std::cout << "checkpoint=" << final_path << '\n';
  return kExitOk;
}

int CmdUpsample(const UpsampleOptions& options) {
  std::cout << "# effective configuration\n"
            << "# input = " << options.input << "\n# output = " << options.output
            << "\n# checkpoint = " << (options.bypass_model ? "<bypass>" : options.checkpoint)
            << "\n# factor = 2\n";
  if (!options.bypass_model && options.checkpoint.empty()) {
    throw ConfigError("upsample needs --checkpoint or --bypass-model");
  }
  const auto input = data::ReadWav(options.input);
  if (input.sample_rate != dsp::kLowSampleRate) {
    throw DataError(options.input + ": expected " + std::to_string(dsp::kLowSampleRate) +
                    " Hz input, got " + std::to_string(input.sample_rate) + " Hz");
  }
  inference::UpsampleResult result;
  if (options.bypass_model) {
    result = inference::Upsampler(nullptr).Upsample(input);
  } else {
    const auto generator = training::LoadGenerator(model::Checkpoint::Load(options.checkpoint));
    result = inference::Upsampler(&generator).Upsample(input);
  }
  if (result.clipped > 0) spdlog::warn("{} samples clipped to [-1, 1]", result.clipped);
  data::WriteWav(options.output, result.audio);
  std::cout << "sample_rate=" << result.audio.sample_rate
            << " samples=" << result.audio.size() << " clipped=" << result.clipped << '\n';
  return kExitOk;
}

int CmdEvaluate(const EvaluateOptions& options) {
  std::vector<std::string> extra;
  if (!options.corpus.empty()) extra.push_back("data.corpus=" + options.corpus);
  if (!options.heldout_tag.empty()) extra.push_back("data.heldout_tag=" + options.heldout_tag);
  const RunConfig config = Resolve(options.sources, extra);
  if (options.checkpoint.empty() && !options.baseline && !options.oracle) {
    throw ConfigError("evaluate needs --checkpoint, --baseline or --oracle");
  }
  Echo(SerializeRunConfig(config) + "checkpoint = " + options.checkpoint + "\n");
  const auto split = LoadSplit(config);
  const auto train_paths = split.TrainPaths();

  if (options.baseline || !options.checkpoint.empty()) {
    std::cout << metrics::FormatReport(metrics::EvaluateCorpus(
        split.heldout, train_paths, metrics::EvalMode::kBaseline, nullptr, config.lsd));
  }
  if (options.oracle) {
    std::cout << metrics::FormatReport(metrics::EvaluateCorpus(
        split.heldout, train_paths, metrics::EvalMode::kOracle, nullptr, config.lsd));
  }
  if (!options.checkpoint.empty()) {
    const auto generator = training::LoadGenerator(model::Checkpoint::Load(options.checkpoint));
    const inference::Upsampler upsampler(&generator);
    std::cout << metrics::FormatReport(metrics::EvaluateCorpus(
        split.heldout, train_paths, metrics::EvalMode::kModel, &upsampler, config.lsd));
  }
  return kExitOk;
}

int CmdCheck(const CheckOptions& options) {
  std::cout << "# effective configuration\n# corrupt_gradient = "
            << (options.corrupt_gradient ? "true" : "false") << '\n';
  const auto results = RunSelfCheck({options.corrupt_gradient});
  std::string failed;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << " s): "
              << r.detail << '\n';
    if (!r.passed && failed.empty()) failed = r.name;
  }
  if (!failed.empty()) {
    std::cerr << "self-check failed: " << failed << '\n';
    return kExitSelfCheck;
  }
  return kExitOk;
}

int RunGuarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace nugan::cli
