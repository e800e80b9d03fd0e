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

#include "nugan/model/generator.h"

#include <cmath>
#include <random>
#include <string>

#include "nugan/errors.h"
#include "nugan/ops.h"

namespace nugan::model {
namespace {

template <typename T>
Tensor<T> UniformWeight(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> data(NumElements(shape));
  for (auto& x : data) x = static_cast<T>(dist(rng));
  return Tensor<T>(std::move(shape), std::move(data), true);
}

template <typename T>
Tensor<T> ZerosParam(std::size_t n) {
  return Tensor<T>::Zeros(Shape{n}, true);
}

template <typename T>
Tensor<T> OnesParam(std::size_t n) {
  return Tensor<T>::Full(Shape{n}, T(1), true);
}

}  // namespace

template <typename T>
Generator<T>::Generator(const GeneratorConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.Validate();
  std::mt19937_64 rng(seed);
  const auto d = static_cast<std::size_t>(config_.d_model);
  const auto ff = static_cast<std::size_t>(config_.d_ff);
  const auto in = static_cast<std::size_t>(config_.in_bins);
  const auto out = static_cast<std::size_t>(config_.out_bins);

  in_weight_ = UniformWeight<T>({in, d}, in, rng);
  in_bias_ = ZerosParam<T>(d);
  blocks_.resize(static_cast<std::size_t>(config_.n_layers));
  for (auto& b : blocks_) {
    b.ln1_gain = OnesParam<T>(d);
    b.ln1_shift = ZerosParam<T>(d);
    b.qkv_weight = UniformWeight<T>({d, 3 * d}, d, rng);
    b.qkv_bias = ZerosParam<T>(3 * d);
    b.out_weight = UniformWeight<T>({d, d}, d, rng);
    b.out_bias = ZerosParam<T>(d);
    b.ln2_gain = OnesParam<T>(d);
    b.ln2_shift = ZerosParam<T>(d);
    b.ff1_weight = UniformWeight<T>({d, ff}, d, rng);
    b.ff1_bias = ZerosParam<T>(ff);
    b.ff2_weight = UniformWeight<T>({ff, d}, ff, rng);
    b.ff2_bias = ZerosParam<T>(d);
  }
  final_gain_ = OnesParam<T>(d);
  final_shift_ = ZerosParam<T>(d);
  head_weight_ = UniformWeight<T>({d, out}, d, rng);
  head_bias_ = ZerosParam<T>(out);

  const auto max_frames = static_cast<std::size_t>(config_.max_frames);
  positions_.resize(max_frames * d);
  for (std::size_t pos = 0; pos < max_frames; ++pos) {
    for (std::size_t i = 0; i < d; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d));
      positions_[pos * d + i] = static_cast<T>(std::sin(static_cast<double>(pos) * freq));
      if (i + 1 < d) {
        positions_[pos * d + i + 1] = static_cast<T>(std::cos(static_cast<double>(pos) * freq));
      }
    }
  }
}

template <typename T>
Tensor<T> Generator<T>::SelfAttention(const Tensor<T>& x, const Block& block,
                                      std::size_t batch, std::size_t frames) const {
  const auto d = static_cast<std::size_t>(config_.d_model);
  const auto heads = static_cast<std::size_t>(config_.n_heads);
  const std::size_t dh = d / heads;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  const auto qkv = Linear(x, block.qkv_weight, block.qkv_bias);
  std::vector<Tensor<T>> per_item;
  per_item.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto rows = batch == 1 ? qkv : Slice(qkv, 0, b * frames, frames);
    std::vector<Tensor<T>> per_head;
    per_head.reserve(heads);
    for (std::size_t h = 0; h < heads; ++h) {
      const auto q = Slice(rows, 1, h * dh, dh);
      const auto k = Slice(rows, 1, d + h * dh, dh);
      const auto v = Slice(rows, 1, 2 * d + h * dh, dh);
      const auto scores = Scale(MatMul(q, Transpose(k, 0, 1)), scale);
      per_head.push_back(MatMul(Softmax(scores, 1), v));
    }
    per_item.push_back(heads == 1 ? per_head[0] : Concat(per_head, 1));
  }
  const auto merged = batch == 1 ? per_item[0] : Concat(per_item, 0);
  return Linear(merged, block.out_weight, block.out_bias);
}

template <typename T>
Tensor<T> Generator<T>::Forward(const Tensor<T>& low) const {
  const auto in = static_cast<std::size_t>(config_.in_bins);
  if (low.rank() != 2 && low.rank() != 3) {
    throw DimensionError("generator input must be [frames, " + std::to_string(in) +
                         "] or [batch, frames, " + std::to_string(in) + "], got " +
                         ShapeToString(low.shape()));
  }
  const bool batched = low.rank() == 3;
  const std::size_t batch = batched ? low.dim(0) : 1;
  const std::size_t frames = low.dim(low.rank() - 2);
  if (low.dim(low.rank() - 1) != in) {
    throw DimensionError("generator expects " + std::to_string(in) +
                         " low-band bins, got " + ShapeToString(low.shape()));
  }
  if (frames == 0 || batch == 0) {
    throw DimensionError("generator input is empty: " + ShapeToString(low.shape()));
  }
  if (frames > static_cast<std::size_t>(config_.max_frames)) {
    throw DimensionError("generator input has " + std::to_string(frames) +
                         " frames, more than max_frames " +
                         std::to_string(config_.max_frames));
  }
  const auto d = static_cast<std::size_t>(config_.d_model);

  std::vector<T> pos(batch * frames * d);
  for (std::size_t b = 0; b < batch; ++b) {
    std::copy_n(positions_.begin(), frames * d, pos.begin() + b * frames * d);
  }
  const Tensor<T> positions(Shape{batch * frames, d}, std::move(pos));

  auto x = Linear(Reshape(low, Shape{batch * frames, in}), in_weight_, in_bias_);
  x = Add(x, positions);
  for (const auto& block : blocks_) {
    const auto h1 = LayerNorm(x, block.ln1_gain, block.ln1_shift);
    x = Add(x, SelfAttention(h1, block, batch, frames));
    const auto h2 = LayerNorm(x, block.ln2_gain, block.ln2_shift);
    const auto hidden = Gelu(Linear(h2, block.ff1_weight, block.ff1_bias));
    x = Add(x, Linear(hidden, block.ff2_weight, block.ff2_bias));
  }
  x = LayerNorm(x, final_gain_, final_shift_);
  auto y = Linear(x, head_weight_, head_bias_);
  const auto out = static_cast<std::size_t>(config_.out_bins);
  return batched ? Reshape(y, Shape{batch, frames, out}) : Reshape(y, Shape{frames, out});
}

template <typename T>
ParameterList<T> Generator<T>::Parameters() const {
  ParameterList<T> params;
  params.push_back({"gen/in/weight", in_weight_});
  params.push_back({"gen/in/bias", in_bias_});
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const std::string p = "gen/block" + std::to_string(i) + "/";
    params.push_back({p + "ln1/gain", b.ln1_gain});
    params.push_back({p + "ln1/shift", b.ln1_shift});
    params.push_back({p + "qkv/weight", b.qkv_weight});
    params.push_back({p + "qkv/bias", b.qkv_bias});
    params.push_back({p + "out/weight", b.out_weight});
    params.push_back({p + "out/bias", b.out_bias});
    params.push_back({p + "ln2/gain", b.ln2_gain});
    params.push_back({p + "ln2/shift", b.ln2_shift});
    params.push_back({p + "ff1/weight", b.ff1_weight});
    params.push_back({p + "ff1/bias", b.ff1_bias});
    params.push_back({p + "ff2/weight", b.ff2_weight});
    params.push_back({p + "ff2/bias", b.ff2_bias});
  }
  params.push_back({"gen/final/gain", final_gain_});
  params.push_back({"gen/final/shift", final_shift_});
  params.push_back({"gen/head/weight", head_weight_});
  params.push_back({"gen/head/bias", head_bias_});
  return params;
}

std::size_t GeneratorParameterCount(const GeneratorConfig& config) {
  const auto d = static_cast<std::size_t>(config.d_model);
  const auto ff = static_cast<std::size_t>(config.d_ff);
  const auto in = static_cast<std::size_t>(config.in_bins);
  const auto out = static_cast<std::size_t>(config.out_bins);
  const std::size_t block = 2 * d + (d * 3 * d + 3 * d) + (d * d + d) + 2 * d +
                            (d * ff + ff) + (ff * d + d);
  return (in * d + d) + static_cast<std::size_t>(config.n_layers) * block + 2 * d +
         (d * out + out);
}

template class Generator<float>;
template class Generator<double>;

}  // namespace nugan::model
