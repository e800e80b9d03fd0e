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

#ifndef NUGAN_MODEL_DISCRIMINATOR_H_
#define NUGAN_MODEL_DISCRIMINATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nugan/model/config.h"
#include "nugan/model/spectral_norm.h"
#include "nugan/ops.h"
#include "nugan/tensor.h"

namespace nugan::model {

template <typename T>
struct DiscriminatorOutput {
  // Outputs of the grouped layers, [batch, channels, frames_l] each.
  std::vector<Tensor<T>> features;
  // Patch logits, [batch, 1, frames_out].
  Tensor<T> logits;
};

// Markovian spectral discriminator over full frames:
//   input projection: kernel-1 conv in_bins -> channels, no groups
//   n_layers grouped convs (kernel, stride, padding (kernel - stride) / 2)
//   logits: kernel-3 conv channels -> 1
// LeakyReLU(0.2) after every layer but the last; every weight is spectrally
// normalized.
template <typename T>
class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig& config, int groups, std::uint64_t seed);

  // full: [frames, in_bins] or [batch, frames, in_bins]. `update_sn` runs the
  // power iteration on each layer before normalizing.
  DiscriminatorOutput<T> Forward(const Tensor<T>& full, bool update_sn);

  // The two halves of Forward: frames -> [batch, channels, frames] after the
  // projection and activation, then the grouped stack and logits.
  Tensor<T> Project(const Tensor<T>& full, bool update_sn);
  DiscriminatorOutput<T> ForwardHidden(const Tensor<T>& projected, bool update_sn);

  int groups() const { return groups_; }
  std::size_t MinFrames() const;
  std::size_t OutputFrames(std::size_t frames) const;

  ParameterList<T> Parameters() const;

  struct NamedSpectralState {
    std::string name;
    SpectralNormState<T>* state;
    Tensor<T> weight;
  };
  std::vector<NamedSpectralState> SpectralStates();

 private:
  struct Layer {
    std::string name;
    Tensor<T> weight;
    Tensor<T> bias;
    SpectralNormState<T> sn;
    Conv1dOptions options;
  };

  Tensor<T> Apply(Layer& layer, const Tensor<T>& x, bool update_sn) const;

  DiscriminatorConfig config_;
  int groups_;
  Layer input_;
  std::vector<Layer> grouped_;
  Layer logits_;
};

// One discriminator per entry of config.group_counts.
template <typename T>
class DiscriminatorEnsemble {
 public:
  DiscriminatorEnsemble(const DiscriminatorConfig& config, std::uint64_t seed);

  std::size_t size() const { return members_.size(); }
  Discriminator<T>& operator[](std::size_t i) { return members_[i]; }
  const Discriminator<T>& operator[](std::size_t i) const { return members_[i]; }

  std::vector<DiscriminatorOutput<T>> Forward(const Tensor<T>& full, bool update_sn);

  // Names are prefixed "d<index>/".
  ParameterList<T> Parameters() const;

  const DiscriminatorConfig& config() const { return config_; }

 private:
  DiscriminatorConfig config_;
  std::vector<Discriminator<T>> members_;
};

std::size_t DiscriminatorParameterCount(const DiscriminatorConfig& config, int groups);

}  // namespace nugan::model

#endif  // NUGAN_MODEL_DISCRIMINATOR_H_
