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

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "nugan/cli/commands.h"

namespace {

void AddConfigSources(CLI::App* cmd, nugan::cli::ConfigSources& sources) {
  cmd->add_option("--config", sources.config_path, "Config file (sectioned key = value)");
  cmd->add_option("--preset", sources.preset, "Preset: full or desk");
  cmd->add_option("--set", sources.overrides, "Override, section.key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("nugan"));

  CLI::App app{"Neural upsampling of 22.05 kHz audio to 44.1 kHz"};
  app.require_subcommand(1);

  nugan::cli::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train the generator and discriminators");
  AddConfigSources(train_cmd, train.sources);
  train_cmd->add_option("--max-steps", train.max_steps, "Training steps");
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--run-dir", train.run_dir,
                        "Output directory (default $NUGAN_RUN_DIR or runs/default)");
  train_cmd->add_option("--corpus", train.corpus, "Corpus manifest, or 'synth'");
  train_cmd->add_option("--resume", train.resume, "Checkpoint to resume from");

  nugan::cli::UpsampleOptions upsample;
  auto* up_cmd = app.add_subcommand("upsample", "Upsample a 22.05 kHz WAV to 44.1 kHz");
  up_cmd->add_option("--checkpoint", upsample.checkpoint, "Trained checkpoint");
  up_cmd->add_flag("--bypass-model", upsample.bypass_model, "Sinc interpolation only");
  up_cmd->add_option("input", upsample.input, "Input WAV (22.05 kHz)")->required();
  up_cmd->add_option("output", upsample.output, "Output WAV (44.1 kHz)")->required();

  nugan::cli::EvaluateOptions evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Report LSD and SNR on the held-out split");
  AddConfigSources(eval_cmd, evaluate.sources);
  eval_cmd->add_option("--checkpoint", evaluate.checkpoint, "Trained checkpoint");
  eval_cmd->add_flag("--baseline", evaluate.baseline, "Report the sinc baseline");
  eval_cmd->add_flag("--oracle", evaluate.oracle,
                     "Report true high bins with interpolated phase");
  eval_cmd->add_option("--corpus", evaluate.corpus, "Corpus manifest, or 'synth'");
  eval_cmd->add_option("--heldout-tag", evaluate.heldout_tag,
                       "Hold out files whose path contains this tag");

  nugan::cli::CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Run the built-in invariant suites");
  check_cmd->add_flag("--corrupt-gradient", check.corrupt_gradient,
                      "Negative control: deliberately wrong gradients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return nugan::cli::kExitConfig;
  }

  return nugan::cli::RunGuarded([&] {
    if (*train_cmd) return nugan::cli::CmdTrain(train);
    if (*up_cmd) return nugan::cli::CmdUpsample(upsample);
    if (*eval_cmd) return nugan::cli::CmdEvaluate(evaluate);
    return nugan::cli::CmdCheck(check);
  });
}
