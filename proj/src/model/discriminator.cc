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

#include "nugan/model/discriminator.h"

#include <cmath>
#include <random>

#include "nugan/errors.h"

namespace nugan::model {
namespace {

// splitmix64 step; derives independent member seeds from one ensemble seed.
std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename T>
Tensor<T> UniformWeight(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> data(NumElements(shape));
  for (auto& x : data) x = static_cast<T>(dist(rng));
  return Tensor<T>(std::move(shape), std::move(data), true);
}

}  // namespace

template <typename T>
Discriminator<T>::Discriminator(const DiscriminatorConfig& config, int groups,
                                std::uint64_t seed)
    : config_(config), groups_(groups) {
  config_.Validate();
  const auto channels = static_cast<std::size_t>(config_.channels);
  if (groups <= 0 || channels % static_cast<std::size_t>(groups) != 0) {
    throw ConfigError("grouped conv needs C_in and C_out divisible by groups: C_in=" +
                      std::to_string(channels) + " C_out=" + std::to_string(channels) +
                      " g=" + std::to_string(groups));
  }
  std::mt19937_64 rng(seed);
  const auto in_bins = static_cast<std::size_t>(config_.in_bins);
  const auto k = static_cast<std::size_t>(config_.kernel);
  const auto stride = static_cast<std::size_t>(config_.stride);
  const auto g = static_cast<std::size_t>(groups);
  const int warmup = config_.sn_warmup_iterations;

  auto make = [&](std::string name, Shape shape, std::size_t fan_in,
                  Conv1dOptions options) {
    Layer layer;
    layer.name = std::move(name);
    layer.weight = UniformWeight<T>(shape, fan_in, rng);
    layer.bias = Tensor<T>::Zeros(Shape{shape[0]}, true);
    layer.sn = InitSpectralNormState(layer.weight, rng, warmup);
    layer.options = options;
    return layer;
  };

  input_ = make("input", {channels, in_bins, 1}, in_bins, {1, 0, 1});
  for (int i = 0; i < config_.n_layers; ++i) {
    grouped_.push_back(make("conv" + std::to_string(i), {channels, channels / g, k},
                            channels / g * k, {stride, (k - stride) / 2, g}));
  }
  logits_ = make("logits", {1, channels, 3}, channels * 3, {1, 1, 1});
}

template <typename T>
Tensor<T> Discriminator<T>::Apply(Layer& layer, const Tensor<T>& x, bool update_sn) const {
  const auto w = SpectralNormalize(layer.weight, layer.sn, update_sn);
  return Conv1dGrouped(x, w, layer.bias, layer.options);
}

template <typename T>
Tensor<T> Discriminator<T>::Project(const Tensor<T>& full, bool update_sn) {
  const auto bins = static_cast<std::size_t>(config_.in_bins);
  if ((full.rank() != 2 && full.rank() != 3) || full.dim(full.rank() - 1) != bins) {
    throw DimensionError("discriminator input must be [frames, " + std::to_string(bins) +
                         "] or [batch, frames, " + std::to_string(bins) + "], got " +
                         ShapeToString(full.shape()));
  }
  const std::size_t frames = full.dim(full.rank() - 2);
  if (frames < MinFrames()) {
    throw DimensionError("discriminator needs at least " + std::to_string(MinFrames()) +
                         " frames, got " + ShapeToString(full.shape()));
  }
  const auto batched =
      full.rank() == 3 ? full : Reshape(full, Shape{1, frames, bins});
  const auto channels_first = Transpose(batched, 1, 2);
  return LeakyRelu(Apply(input_, channels_first, update_sn));
}

template <typename T>
DiscriminatorOutput<T> Discriminator<T>::ForwardHidden(const Tensor<T>& projected,
                                                       bool update_sn) {
  DiscriminatorOutput<T> out;
  Tensor<T> x = projected;
  for (auto& layer : grouped_) {
    x = LeakyRelu(Apply(layer, x, update_sn));
    out.features.push_back(x);
  }
  out.logits = Apply(logits_, x, update_sn);
  return out;
}

template <typename T>
DiscriminatorOutput<T> Discriminator<T>::Forward(const Tensor<T>& full, bool update_sn) {
  return ForwardHidden(Project(full, update_sn), update_sn);
}

template <typename T>
std::size_t Discriminator<T>::OutputFrames(std::size_t frames) const {
  const auto k = static_cast<std::size_t>(config_.kernel);
  const auto stride = static_cast<std::size_t>(config_.stride);
  const std::size_t pad = (k - stride) / 2;
  std::size_t length = frames;
  for (int i = 0; i < config_.n_layers; ++i) {
    if (length + 2 * pad < k) return 0;
    length = Conv1dOutputLength(length, k, stride, pad);
  }
  if (length == 0) return 0;
  return Conv1dOutputLength(length, 3, 1, 1);
}

template <typename T>
std::size_t Discriminator<T>::MinFrames() const {
  std::size_t frames = 1;
  while (OutputFrames(frames) == 0) ++frames;
  return frames;
}

template <typename T>
ParameterList<T> Discriminator<T>::Parameters() const {
  ParameterList<T> params;
  auto add = [&](const Layer& layer) {
    params.push_back({layer.name + "/weight", layer.weight});
    params.push_back({layer.name + "/bias", layer.bias});
  };
  add(input_);
  for (const auto& layer : grouped_) add(layer);
  add(logits_);
  return params;
}

template <typename T>
std::vector<typename Discriminator<T>::NamedSpectralState>
Discriminator<T>::SpectralStates() {
  std::vector<NamedSpectralState> states;
  states.push_back({input_.name, &input_.sn, input_.weight});
  for (auto& layer : grouped_) states.push_back({layer.name, &layer.sn, layer.weight});
  states.push_back({logits_.name, &logits_.sn, logits_.weight});
  return states;
}

template <typename T>
DiscriminatorEnsemble<T>::DiscriminatorEnsemble(const DiscriminatorConfig& config,
                                                std::uint64_t seed)
    : config_(config) {
  config_.Validate();
  members_.reserve(config_.group_counts.size());
  for (std::size_t i = 0; i < config_.group_counts.size(); ++i) {
    members_.emplace_back(config_, config_.group_counts[i], MixSeed(seed + i));
  }
}

template <typename T>
std::vector<DiscriminatorOutput<T>> DiscriminatorEnsemble<T>::Forward(const Tensor<T>& full,
                                                                      bool update_sn) {
  std::vector<DiscriminatorOutput<T>> outs;
  outs.reserve(members_.size());
  for (auto& m : members_) outs.push_back(m.Forward(full, update_sn));
  return outs;
}

template <typename T>
ParameterList<T> DiscriminatorEnsemble<T>::Parameters() const {
  ParameterList<T> params;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    for (auto& p : members_[i].Parameters()) {
      params.push_back({"d" + std::to_string(i) + "/" + p.name, p.tensor});
    }
  }
  return params;
}

std::size_t DiscriminatorParameterCount(const DiscriminatorConfig& config, int groups) {
  const auto c = static_cast<std::size_t>(config.channels);
  const auto k = static_cast<std::size_t>(config.kernel);
  const auto g = static_cast<std::size_t>(groups);
  const std::size_t input = static_cast<std::size_t>(config.in_bins) * c + c;
  const std::size_t grouped = c * (c / g) * k + c;
  const std::size_t logits = c * 3 + 1;
  return input + static_cast<std::size_t>(config.n_layers) * grouped + logits;
}

template class Discriminator<float>;
template class Discriminator<double>;
template class DiscriminatorEnsemble<float>;
template class DiscriminatorEnsemble<double>;

}  // namespace nugan::model
