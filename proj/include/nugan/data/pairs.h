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

#ifndef NUGAN_DATA_PAIRS_H_
#define NUGAN_DATA_PAIRS_H_

#include <cstddef>
#include <string>

#include "nugan/dsp/audio.h"
#include "nugan/dsp/stft.h"

namespace nugan::data {

// Analysis of a band-limited signal after sinc interpolation to the high rate.
struct InterpolatedFeatures {
  dsp::AudioBuffer interpolated;  // 44.1 kHz
  dsp::LogMagnitude low;          // [T, 257]
  dsp::Phase phase;               // [T, 513]
};

// low_rate (22.05 kHz) -> sinc_upsample(x2) -> stft -> low log-magnitude and
// full phase. Throws DataError on the wrong rate or too-short audio.
InterpolatedFeatures AnalyzeLowRate(const dsp::AudioBuffer& low_rate);

struct TrainingExample {
  dsp::LogMagnitude low;        // [T, 257], from the interpolated audio
  dsp::LogMagnitude high_real;  // [T, 256], from the ground truth
  dsp::Phase phase_full;        // [T, 513], from the interpolated audio
  std::string source;
  std::size_t offset = 0;  // first high-rate sample used

  std::size_t frames() const { return low.values.rows; }
};

// high: 44.1 kHz ground truth, at least n_fft samples. An odd trailing sample
// is dropped so both paths see the same length.
TrainingExample MakePair(const dsp::AudioBuffer& high, const std::string& source = "",
                         std::size_t offset = 0);

}  // namespace nugan::data

#endif  // NUGAN_DATA_PAIRS_H_
