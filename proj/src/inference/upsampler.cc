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

#include "nugan/inference/upsampler.h"

#include <algorithm>
#include <cmath>

#include "nugan/data/pairs.h"
#include "nugan/dsp/resample.h"
#include "nugan/errors.h"

namespace nugan::inference {

dsp::LogMagnitude Upsampler::PredictHigh(const dsp::LogMagnitude& low) const {
  if (generator_ == nullptr) throw ConfigError("no generator loaded");
  const auto& values = low.values;
  if (values.cols != dsp::kLowBins) {
    throw DimensionError("expected " + std::to_string(dsp::kLowBins) +
                         " low bins, got " + std::to_string(values.cols));
  }
  const auto chunk = static_cast<std::size_t>(generator_->config().max_frames);
  dsp::LogMagnitude high;
  high.floor = low.floor;
  high.values = dsp::RealMatrix(values.rows, dsp::kHighBins);
  NoGradGuard no_grad;
  for (std::size_t start = 0; start < values.rows; start += chunk) {
    const std::size_t frames = std::min(chunk, values.rows - start);
    std::vector<float> input(values.data.begin() + start * values.cols,
                             values.data.begin() + (start + frames) * values.cols);
    const Tensor<float> x(Shape{frames, dsp::kLowBins}, std::move(input));
    const auto y = generator_->Forward(x).data();
    std::copy(y.begin(), y.end(), high.values.data.begin() + start * dsp::kHighBins);
  }
  for (double v : high.values.data) {
    if (!std::isfinite(v)) throw NumericError("generator produced a non-finite value");
  }
  // Frames with a silent low band stay silent.
  const double silent = std::log(low.floor) + 1e-9;
  for (std::size_t t = 0; t < values.rows; ++t) {
    const auto row = values.data.begin() + t * values.cols;
    if (std::all_of(row, row + values.cols, [silent](double v) { return v <= silent; })) {
      std::fill_n(high.values.data.begin() + t * dsp::kHighBins, dsp::kHighBins,
                  std::log(low.floor));
    }
  }
  return high;
}

UpsampleResult Upsampler::Upsample(const dsp::AudioBuffer& low_rate) const {
  if (generator_ == nullptr) {
    if (low_rate.sample_rate != dsp::kLowSampleRate) {
      throw DataError("expected " + std::to_string(dsp::kLowSampleRate) +
                      " Hz input, got " + std::to_string(low_rate.sample_rate) + " Hz");
    }
    dsp::ValidateAudio(low_rate);
    return {dsp::SincUpsample(low_rate, 2), 0};
  }
  const auto features = data::AnalyzeLowRate(low_rate);
  const auto recon = dsp::ReconstructFull(features.low, PredictHigh(features.low),
                                          features.phase);
  return {recon.audio, recon.clipped};
}

}  // namespace nugan::inference
