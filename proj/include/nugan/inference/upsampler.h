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

#ifndef NUGAN_INFERENCE_UPSAMPLER_H_
#define NUGAN_INFERENCE_UPSAMPLER_H_

#include <cstddef>

#include "nugan/dsp/audio.h"
#include "nugan/dsp/stft.h"
#include "nugan/model/generator.h"

namespace nugan::inference {

struct UpsampleResult {
  dsp::AudioBuffer audio;   // 44.1 kHz, same duration as the input
  std::size_t clipped = 0;  // samples clamped to [-1, 1]
};

// 22.05 kHz -> 44.1 kHz. Without a generator this is the sinc baseline;
// with one, the predicted high bins are joined to the interpolated low bins
// and inverted with the interpolated phase. The generator is only read.
class Upsampler {
 public:
  explicit Upsampler(const model::Generator<float>* generator = nullptr)
      : generator_(generator) {}

  bool bypass() const { return generator_ == nullptr; }

  UpsampleResult Upsample(const dsp::AudioBuffer& low_rate) const;

  // [T, 257] -> [T, 256], in chunks of at most max_frames.
  dsp::LogMagnitude PredictHigh(const dsp::LogMagnitude& low) const;

 private:
  const model::Generator<float>* generator_;
};

}  // namespace nugan::inference

#endif  // NUGAN_INFERENCE_UPSAMPLER_H_
