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

#include "nugan/training/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nugan/dsp/stft.h"
#include "nugan/errors.h"
#include "nugan/ops.h"
#include "nugan/training/losses.h"

namespace nugan::training {
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDiscriminatorSeedOffset = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kSamplerSeedOffset = 0xd1b54a32d192ed03ULL;

// Restores requires_grad on the discriminator parameters when the generator
// update leaves scope, including by exception.
class FrozenParameters {
 public:
  explicit FrozenParameters(ParameterList<float>& params) : params_(params) {
    SetRequiresGrad(params_, false);
  }
  ~FrozenParameters() { SetRequiresGrad(params_, true); }
  FrozenParameters(const FrozenParameters&) = delete;
  FrozenParameters& operator=(const FrozenParameters&) = delete;

 private:
  ParameterList<float>& params_;
};

void StoreAdam(model::Checkpoint& ckpt, const std::string& prefix,
               const ParameterList<float>& params, const AdamState<float>& state) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& shape = params[i].tensor.shape();
    ckpt.PutF32(prefix + "/m/" + params[i].name, shape, state.m[i]);
    ckpt.PutF32(prefix + "/v/" + params[i].name, shape, state.v[i]);
  }
  const std::uint64_t t = state.t;
  ckpt.PutU64(prefix + "/t", std::span<const std::uint64_t>(&t, 1));
}

void RestoreAdam(const model::Checkpoint& ckpt, const std::string& prefix,
                 const ParameterList<float>& params, AdamState<float>& state) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& shape = params[i].tensor.shape();
    state.m[i] = ckpt.F32(prefix + "/m/" + params[i].name, &shape);
    state.v[i] = ckpt.F32(prefix + "/v/" + params[i].name, &shape);
  }
  const auto t = ckpt.U64(prefix + "/t");
  if (t.size() != 1) throw DataError("checkpoint record " + prefix + "/t is malformed");
  state.t = t[0];
}

std::string SpectralKey(std::size_t member, const std::string& layer) {
  return "sn/d" + std::to_string(member) + "/" + layer;
}

}  // namespace

void TrainConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(lr_g > 0.0)) fail("lr_g must be > 0");
  if (!(lr_d > 0.0)) fail("lr_d must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must be in [0, 1)");
  if (!(eps > 0.0)) fail("eps must be > 0");
  if (!(lambda_fm >= 0.0)) fail("lambda_fm must be >= 0");
  if (batch_frames <= 0) fail("batch_frames must be > 0");
  if (batch_size <= 0) fail("batch_size must be > 0");
  if (max_steps < 0) fail("max_steps must be >= 0");
  if (checkpoint_interval <= 0) fail("checkpoint_interval must be > 0");
  if (!(grad_clip >= 0.0)) fail("grad_clip must be >= 0");
}

std::string SerializeTrainConfig(const TrainConfig& c) {
  return fmt::format(
      "train.lr_g = {}\ntrain.lr_d = {}\ntrain.beta1 = {}\ntrain.beta2 = {}\n"
      "train.eps = {}\ntrain.lambda_fm = {}\ntrain.batch_frames = {}\n"
      "train.batch_size = {}\ntrain.max_steps = {}\ntrain.seed = {}\n"
      "train.checkpoint_interval = {}\ntrain.grad_clip = {}\n",
      c.lr_g, c.lr_d, c.beta1, c.beta2, c.eps, c.lambda_fm, c.batch_frames, c.batch_size,
      c.max_steps, c.seed, c.checkpoint_interval, c.grad_clip);
}

Batch MakeBatch(const std::vector<data::TrainingExample>& examples,
                const std::vector<std::size_t>& indices,
                const std::vector<std::size_t>& offsets, std::size_t frames) {
  if (indices.empty() || indices.size() != offsets.size()) {
    throw DimensionError("batch needs one offset per example");
  }
  const std::size_t b = indices.size();
  std::vector<float> low(b * frames * dsp::kLowBins);
  std::vector<float> high(b * frames * dsp::kHighBins);
  for (std::size_t i = 0; i < b; ++i) {
    const auto& ex = examples.at(indices[i]);
    if (offsets[i] + frames > ex.frames()) {
      throw DimensionError(ex.source + ": crop [" + std::to_string(offsets[i]) + ", " +
                           std::to_string(offsets[i] + frames) + ") exceeds " +
                           std::to_string(ex.frames()) + " frames");
    }
    const auto& lv = ex.low.values.data;
    const auto& hv = ex.high_real.values.data;
    std::copy_n(lv.begin() + offsets[i] * dsp::kLowBins, frames * dsp::kLowBins,
                low.begin() + i * frames * dsp::kLowBins);
    std::copy_n(hv.begin() + offsets[i] * dsp::kHighBins, frames * dsp::kHighBins,
                high.begin() + i * frames * dsp::kHighBins);
  }
  return {Tensor<float>(Shape{b, frames, dsp::kLowBins}, std::move(low)),
          Tensor<float>(Shape{b, frames, dsp::kHighBins}, std::move(high))};
}

BatchSampler::BatchSampler(const std::vector<data::TrainingExample>& examples,
                           std::size_t batch_size, std::size_t frames, std::uint64_t seed)
    : examples_(&examples), batch_size_(batch_size), frames_(frames), rng_(seed) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].frames() >= frames) usable_.push_back(i);
  }
  if (usable_.empty()) {
    throw DataError("no training example has at least " + std::to_string(frames) +
                    " frames");
  }
  Reshuffle();
}

void BatchSampler::Reshuffle() {
  order_ = usable_;
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

Batch BatchSampler::Next() {
  std::vector<std::size_t> indices;
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < batch_size_; ++i) {
    if (cursor_ == order_.size()) Reshuffle();
    const std::size_t idx = order_[cursor_++];
    const std::size_t span = (*examples_)[idx].frames() - frames_;
    std::uniform_int_distribution<std::size_t> pick(0, span);
    indices.push_back(idx);
    offsets.push_back(pick(rng_));
  }
  return MakeBatch(*examples_, indices, offsets, frames_);
}

std::string BatchSampler::SaveState() const {
  std::ostringstream out;
  out << cursor_ << ' ' << order_.size();
  for (auto i : order_) out << ' ' << i;
  out << '\n' << rng_;
  return out.str();
}

void BatchSampler::LoadState(const std::string& text) {
  std::istringstream in(text);
  std::size_t cursor = 0;
  std::size_t n = 0;
  in >> cursor >> n;
  std::vector<std::size_t> order(n);
  for (auto& i : order) in >> i;
  std::mt19937_64 rng;
  in >> rng;
  if (!in || cursor > n) throw DataError("sampler state in checkpoint is malformed");
  for (auto i : order) {
    if (i >= examples_->size()) {
      throw DataError("sampler state refers to example " + std::to_string(i) +
                      " but the dataset has " + std::to_string(examples_->size()));
    }
  }
  cursor_ = cursor;
  order_ = std::move(order);
  rng_ = rng;
}

std::string FormatLogLine(const StepReport& r) {
  return fmt::format("{}\t{:.9g}\t{:.9g}\t{:.9g}\t{:.3f}", r.step, r.d_loss, r.g_adv, r.g_fm,
                     r.seconds);
}

Trainer::Trainer(const model::ModelConfig& model_config, const TrainConfig& train_config)
    : model_config_(model_config),
      train_config_(train_config),
      generator_((model_config.Validate(), model_config.generator), train_config.seed),
      discriminators_(model_config.discriminator,
                      train_config.seed + kDiscriminatorSeedOffset) {
  train_config_.Validate();
  if (model_config_.discriminator.in_bins !=
      model_config_.generator.in_bins + model_config_.generator.out_bins) {
    throw ConfigError("discriminator in_bins must equal generator in_bins + out_bins");
  }
  g_params_ = generator_.Parameters();
  d_params_ = discriminators_.Parameters();
  adam_g_ = MakeAdamState(g_params_);
  adam_d_ = MakeAdamState(d_params_);
}

Tensor<float> Trainer::Predict(const Tensor<float>& low) const {
  NoGradGuard no_grad;
  return generator_.Forward(low);
}

GeneratorLosses GeneratorObjective(const model::Generator<float>& generator,
                                   model::DiscriminatorEnsemble<float>& discriminators,
                                   const Batch& batch, double lambda_fm) {
  const auto real_full = Concat<float>({batch.low, batch.high}, 2);
  std::vector<model::DiscriminatorOutput<float>> real_outs;
  {
    NoGradGuard no_grad;
    real_outs = discriminators.Forward(real_full, false);
  }
  const auto fake_high = generator.Forward(batch.low);
  const auto fake_outs = discriminators.Forward(Concat<float>({batch.low, fake_high}, 2), false);
  std::vector<Tensor<float>> fake_logits;
  std::vector<std::vector<Tensor<float>>> real_feats;
  std::vector<std::vector<Tensor<float>>> fake_feats;
  for (std::size_t i = 0; i < fake_outs.size(); ++i) {
    fake_logits.push_back(fake_outs[i].logits);
    real_feats.push_back(real_outs[i].features);
    fake_feats.push_back(fake_outs[i].features);
  }
  GeneratorLosses out;
  out.adversarial = HingeGLoss(fake_logits);
  out.feature_matching = FeatureMatchingLoss(real_feats, fake_feats);
  out.total = lambda_fm == 0.0
                  ? out.adversarial
                  : Add(out.adversarial,
                        Scale(out.feature_matching, static_cast<float>(lambda_fm)));
  return out;
}

void Trainer::CheckBatch(const Batch& batch) const {
  if (batch.low.rank() != 3 || batch.high.rank() != 3 ||
      batch.high.dim(0) != batch.low.dim(0) || batch.high.dim(1) != batch.low.dim(1)) {
    throw DimensionError("batch shapes disagree: low " + ShapeToString(batch.low.shape()) +
                         ", high " + ShapeToString(batch.high.shape()));
  }
}

NumericError Trainer::Dump(const std::string& what, const StepReport& report) const {
  return NumericError(fmt::format(
      "{} at step {}: d_loss={} g_adv={} g_fm={} grad_norm_d={} grad_norm_g={}", what,
      report.step, report.d_loss, report.g_adv, report.g_fm, GradNorm(d_params_),
      GradNorm(g_params_)));
}

void Trainer::DiscriminatorStep(const Batch& batch, StepReport& report) {
  CheckBatch(batch);
  auto& tape = Tape<float>::Current();
  tape.Clear();
  report.step = step_ + 1;
  const std::size_t b = batch.low.dim(0);
  const AdamConfig adam{train_config_.lr_d, train_config_.beta1, train_config_.beta2,
                        train_config_.eps};
  try {
    Tensor<float> fake_high;
    {
      NoGradGuard no_grad;
      fake_high = generator_.Forward(batch.low);
    }
    const auto real_full = Concat<float>({batch.low, batch.high}, 2);
    const auto fake_full = Concat<float>({batch.low, fake_high}, 2);
    // Real and fake share one forward so each step runs one power iteration.
    const auto both = Concat<float>({real_full, fake_full}, 0);
    ZeroGrads(d_params_);
    const auto outs = discriminators_.Forward(both, true);
    std::vector<Tensor<float>> real_logits;
    std::vector<Tensor<float>> fake_logits;
    for (const auto& o : outs) {
      real_logits.push_back(Slice(o.logits, 0, 0, b));
      fake_logits.push_back(Slice(o.logits, 0, b, b));
    }
    const auto d_loss = HingeDLoss(real_logits, fake_logits);
    report.d_loss = d_loss.item();
    if (!std::isfinite(report.d_loss)) throw Dump("non-finite discriminator loss", report);
    Backward(d_loss);
    if (train_config_.grad_clip > 0.0) ClipGradNorm(d_params_, train_config_.grad_clip);
    AdamStep(d_params_, adam_d_, adam);
  } catch (...) {
    tape.Clear();
    throw;
  }
}

void Trainer::GeneratorStep(const Batch& batch, StepReport& report) {
  CheckBatch(batch);
  auto& tape = Tape<float>::Current();
  tape.Clear();
  report.step = step_ + 1;
  const AdamConfig adam{train_config_.lr_g, train_config_.beta1, train_config_.beta2,
                        train_config_.eps};
  try {
    FrozenParameters frozen(d_params_);
    ZeroGrads(g_params_);
    const auto g =
        GeneratorObjective(generator_, discriminators_, batch, train_config_.lambda_fm);
    report.g_adv = g.adversarial.item();
    report.g_fm = g.feature_matching.item();
    if (!std::isfinite(report.g_adv) || !std::isfinite(report.g_fm)) {
      throw Dump("non-finite generator loss", report);
    }
    Backward(g.total);
    if (train_config_.grad_clip > 0.0) ClipGradNorm(g_params_, train_config_.grad_clip);
    AdamStep(g_params_, adam_g_, adam);
  } catch (...) {
    tape.Clear();
    throw;
  }
}

StepReport Trainer::TrainStep(const Batch& batch) {
  const auto start = std::chrono::steady_clock::now();
  StepReport report;
  DiscriminatorStep(batch, report);
  GeneratorStep(batch, report);
  step_ += 1;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

model::Checkpoint Trainer::ToCheckpoint(const BatchSampler* sampler) const {
  model::Checkpoint ckpt(model::ModelConfigDigest(model_config_));
  ckpt.PutText("meta/model_config", model::SerializeModelConfig(model_config_));
  ckpt.PutText("meta/train_config", SerializeTrainConfig(train_config_));
  const std::uint64_t step = static_cast<std::uint64_t>(step_);
  ckpt.PutU64("meta/step", std::span<const std::uint64_t>(&step, 1));
  model::StoreParameters(ckpt, g_params_);
  model::StoreParameters(ckpt, d_params_);
  StoreAdam(ckpt, "adam_g", g_params_, adam_g_);
  StoreAdam(ckpt, "adam_d", d_params_, adam_d_);
  // SpectralStates() hands out mutable pointers; only reads happen here.
  auto& ensemble = const_cast<model::DiscriminatorEnsemble<float>&>(discriminators_);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    for (const auto& s : ensemble[i].SpectralStates()) {
      ckpt.PutF32(SpectralKey(i, s.name), Shape{s.state->u.size()}, s.state->u);
    }
  }
  if (sampler != nullptr) ckpt.PutText("sampler/state", sampler->SaveState());
  return ckpt;
}

void Trainer::FromCheckpoint(const model::Checkpoint& ckpt, BatchSampler* sampler) {
  const auto expected = model::ModelConfigDigest(model_config_);
  if (ckpt.digest() != expected) {
    throw DataError(fmt::format(
        "checkpoint was written for a different model config (digest {:016x}, expected "
        "{:016x})",
        ckpt.digest(), expected));
  }
  model::RestoreParameters(ckpt, g_params_);
  model::RestoreParameters(ckpt, d_params_);
  RestoreAdam(ckpt, "adam_g", g_params_, adam_g_);
  RestoreAdam(ckpt, "adam_d", d_params_, adam_d_);
  for (std::size_t i = 0; i < discriminators_.size(); ++i) {
    for (auto& s : discriminators_[i].SpectralStates()) {
      const Shape shape{s.state->u.size()};
      s.state->u = ckpt.F32(SpectralKey(i, s.name), &shape);
    }
  }
  const auto step = ckpt.U64("meta/step");
  if (step.size() != 1) throw DataError("checkpoint record meta/step is malformed");
  step_ = static_cast<std::int64_t>(step[0]);
  if (sampler != nullptr) sampler->LoadState(ckpt.Text("sampler/state"));
}

model::Generator<float> LoadGenerator(const model::Checkpoint& ckpt) {
  const auto config = model::ParseModelConfig(ckpt.Text("meta/model_config"));
  if (model::ModelConfigDigest(config) != ckpt.digest()) {
    throw DataError("checkpoint config digest does not match its stored model config");
  }
  model::Generator<float> generator(config.generator, 0);
  auto params = generator.Parameters();
  model::RestoreParameters(ckpt, params);
  return generator;
}

std::string CheckpointName(std::int64_t step) {
  return fmt::format("ckpt_{:06d}.nug", step);
}

namespace {

// Keeps log lines whose step is at most `last_step`.
void TruncateLog(const fs::path& path, std::int64_t last_step) {
  std::vector<std::string> kept;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (std::stoll(line.substr(0, line.find('\t'))) <= last_step) kept.push_back(line);
    }
  }
  std::ofstream out(path, std::ios::trunc);
  for (const auto& line : kept) out << line << '\n';
  if (!out) throw DataError("cannot rewrite loss log " + path.string());
}

}  // namespace

std::string TrainLoop(const std::vector<data::TrainingExample>& dataset,
                      const model::ModelConfig& model_config, const TrainConfig& config,
                      const LoopOptions& options) {
  if (dataset.empty()) throw DataError("training dataset is empty");
  config.Validate();
  const fs::path run_dir(options.run_dir);
  std::error_code ec;
  fs::create_directories(run_dir, ec);
  if (ec) throw DataError("cannot create run directory " + run_dir.string());

  Trainer trainer(model_config, config);
  BatchSampler sampler(dataset, static_cast<std::size_t>(config.batch_size),
                       static_cast<std::size_t>(config.batch_frames),
                       config.seed + kSamplerSeedOffset);
  const fs::path log_path = run_dir / "loss.log";
  if (options.resume_from) {
    trainer.FromCheckpoint(model::Checkpoint::Load(*options.resume_from), &sampler);
    TruncateLog(log_path, trainer.step());
  } else {
    std::ofstream fresh(log_path, std::ios::trunc);
    if (!fresh) throw DataError("cannot create loss log " + log_path.string());
  }
  std::ofstream log(log_path, std::ios::app);
  if (!log) throw DataError("cannot open loss log " + log_path.string());

  std::string last_path;
  auto save = [&] {
    const auto path = (run_dir / CheckpointName(trainer.step())).string();
    trainer.ToCheckpoint(&sampler).Save(path);
    last_path = path;
  };
  while (trainer.step() < config.max_steps) {
    const auto report = trainer.TrainStep(sampler.Next());
    log << FormatLogLine(report) << '\n';
    log.flush();
    if (!log) throw DataError("write failed for loss log " + log_path.string());
    if (options.on_step) options.on_step(report);
    if (report.step % config.checkpoint_interval == 0) save();
  }
  if (last_path.empty() || fs::path(last_path).filename() != CheckpointName(trainer.step())) {
    save();
  }
  return last_path;
}

}  // namespace nugan::training
