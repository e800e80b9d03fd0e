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

#ifndef NUGAN_MODEL_GENERATOR_H_
#define NUGAN_MODEL_GENERATOR_H_

#include <cstdint>
#include <vector>

#include "nugan/model/config.h"
#include "nugan/tensor.h"

namespace nugan::model {

// Transformer mapping low-band log magnitudes to high-band log magnitudes,
// frame by frame with bidirectional attention across frames:
//   linear(in_bins -> d_model) + sinusoidal positions
//   n_layers x pre-norm block (multi-head self-attention, GELU feed-forward)
//   layer norm, linear(d_model -> out_bins)
template <typename T>
class Generator {
 public:
  Generator(const GeneratorConfig& config, std::uint64_t seed);

  // low: [frames, in_bins] or [batch, frames, in_bins]. Returns the same
  // leading shape with out_bins. Throws DimensionError past max_frames.
  Tensor<T> Forward(const Tensor<T>& low) const;

  const GeneratorConfig& config() const { return config_; }
  ParameterList<T> Parameters() const;

 private:
  struct Block {
    Tensor<T> ln1_gain, ln1_shift;
    Tensor<T> qkv_weight, qkv_bias;
    Tensor<T> out_weight, out_bias;
    Tensor<T> ln2_gain, ln2_shift;
    Tensor<T> ff1_weight, ff1_bias;
    Tensor<T> ff2_weight, ff2_bias;
  };

  Tensor<T> SelfAttention(const Tensor<T>& x, const Block& block,
                          std::size_t batch, std::size_t frames) const;

  GeneratorConfig config_;
  Tensor<T> in_weight_, in_bias_;
  std::vector<Block> blocks_;
  Tensor<T> final_gain_, final_shift_;
  Tensor<T> head_weight_, head_bias_;
  std::vector<T> positions_;  // [max_frames, d_model]
};

// Closed-form count used by tests and logs.
std::size_t GeneratorParameterCount(const GeneratorConfig& config);

}  // namespace nugan::model

#endif  // NUGAN_MODEL_GENERATOR_H_
