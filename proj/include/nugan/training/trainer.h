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

#ifndef NUGAN_TRAINING_TRAINER_H_
#define NUGAN_TRAINING_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nugan/data/pairs.h"
#include "nugan/errors.h"
#include "nugan/model/checkpoint.h"
#include "nugan/model/config.h"
#include "nugan/model/discriminator.h"
#include "nugan/model/generator.h"
#include "nugan/training/adam.h"

namespace nugan::training {

struct TrainConfig {
  double lr_g = 1e-4;
  double lr_d = 4e-4;
  double beta1 = 0.0;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lambda_fm = 10.0;
  int batch_frames = 128;
  int batch_size = 8;
  int max_steps = 5000;
  std::uint64_t seed = 0;
  int checkpoint_interval = 500;
  // Global gradient-norm clip; 0 disables.
  double grad_clip = 0.0;

  void Validate() const;
};

std::string SerializeTrainConfig(const TrainConfig& config);

struct Batch {
  Tensor<float> low;   // [B, T, 257]
  Tensor<float> high;  // [B, T, 256]
};

// Stacks frames [offsets[i], offsets[i] + frames) of each chosen example.
Batch MakeBatch(const std::vector<data::TrainingExample>& examples,
                const std::vector<std::size_t>& indices,
                const std::vector<std::size_t>& offsets, std::size_t frames);

// Epoch-wise shuffled order with a random crop per draw, all from one seeded
// generator. Examples shorter than `frames` are never drawn.
class BatchSampler {
 public:
  BatchSampler(const std::vector<data::TrainingExample>& examples, std::size_t batch_size,
               std::size_t frames, std::uint64_t seed);

  Batch Next();

  std::string SaveState() const;
  void LoadState(const std::string& text);

  std::size_t usable() const { return usable_.size(); }

 private:
  void Reshuffle();

  const std::vector<data::TrainingExample>* examples_;
  std::size_t batch_size_;
  std::size_t frames_;
  std::vector<std::size_t> usable_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::mt19937_64 rng_;
};

struct StepReport {
  std::int64_t step = 0;
  double d_loss = 0.0;
  double g_adv = 0.0;
  double g_fm = 0.0;
  double seconds = 0.0;
};

// `step<TAB>d_loss<TAB>g_adv<TAB>g_fm<TAB>seconds`, losses with round-trip precision.
std::string FormatLogLine(const StepReport& report);

struct GeneratorLosses {
  Tensor<float> total;  // adversarial + lambda_fm * feature_matching
  Tensor<float> adversarial;
  Tensor<float> feature_matching;
};

// Generator objective against the ensemble as it stands. The discriminators'
// spectral-norm vectors are not advanced; freezing their parameters is up to
// the caller.
GeneratorLosses GeneratorObjective(const model::Generator<float>& generator,
                                   model::DiscriminatorEnsemble<float>& discriminators,
                                   const Batch& batch, double lambda_fm);

class Trainer {
 public:
  Trainer(const model::ModelConfig& model_config, const TrainConfig& train_config);

  // One discriminator update, then one generator update; advances step().
  StepReport TrainStep(const Batch& batch);
  // The two halves of TrainStep. Each fills its loss fields of `report` and
  // leaves step() unchanged.
  void DiscriminatorStep(const Batch& batch, StepReport& report);
  void GeneratorStep(const Batch& batch, StepReport& report);

  // Generator high-bin prediction for a batch, without recording.
  Tensor<float> Predict(const Tensor<float>& low) const;

  model::Generator<float>& generator() { return generator_; }
  const model::Generator<float>& generator() const { return generator_; }
  model::DiscriminatorEnsemble<float>& discriminators() { return discriminators_; }
  const model::ModelConfig& model_config() const { return model_config_; }
  const TrainConfig& train_config() const { return train_config_; }
  std::int64_t step() const { return step_; }

  const AdamState<float>& adam_g() const { return adam_g_; }
  const AdamState<float>& adam_d() const { return adam_d_; }

  // Parameters, optimizer moments, spectral-norm vectors, the step counter,
  // and (when given) the sampler state.
  model::Checkpoint ToCheckpoint(const BatchSampler* sampler = nullptr) const;
  // Throws DataError when the checkpoint's model config differs.
  void FromCheckpoint(const model::Checkpoint& ckpt, BatchSampler* sampler = nullptr);

 private:
  void CheckBatch(const Batch& batch) const;
  NumericError Dump(const std::string& what, const StepReport& report) const;

  model::ModelConfig model_config_;
  TrainConfig train_config_;
  model::Generator<float> generator_;
  model::DiscriminatorEnsemble<float> discriminators_;
  ParameterList<float> g_params_;
  ParameterList<float> d_params_;
  AdamState<float> adam_g_;
  AdamState<float> adam_d_;
  std::int64_t step_ = 0;
};

// Loads a generator from a checkpoint written by Trainer::ToCheckpoint.
model::Generator<float> LoadGenerator(const model::Checkpoint& ckpt);

struct LoopOptions {
  std::string run_dir;
  // Resume from this checkpoint; the loss log keeps only lines up to its step.
  std::optional<std::string> resume_from;
  std::function<void(const StepReport&)> on_step;
};

// Trains to config.max_steps, appending to run_dir/loss.log and writing
// run_dir/ckpt_<step>.nug every checkpoint_interval steps and at the end.
// Returns the final checkpoint path.
std::string TrainLoop(const std::vector<data::TrainingExample>& dataset,
                      const model::ModelConfig& model_config, const TrainConfig& config,
                      const LoopOptions& options);

std::string CheckpointName(std::int64_t step);

}  // namespace nugan::training

#endif  // NUGAN_TRAINING_TRAINER_H_
