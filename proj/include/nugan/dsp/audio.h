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

#ifndef NUGAN_DSP_AUDIO_H_
#define NUGAN_DSP_AUDIO_H_

#include <cstddef>
#include <vector>

namespace nugan::dsp {

inline constexpr int kLowSampleRate = 22050;
inline constexpr int kHighSampleRate = 44100;

// Mono waveform. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws DataError on a non-positive rate or non-finite samples.
void ValidateAudio(const AudioBuffer& audio);

// Dense row-major [rows, cols] array; rows are STFT frames, cols are bins.
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Columns [start, start + count).
RealMatrix SliceColumns(const RealMatrix& m, std::size_t start, std::size_t count);
// Rows [start, start + count).
RealMatrix SliceRows(const RealMatrix& m, std::size_t start, std::size_t count);
RealMatrix ConcatColumns(const RealMatrix& left, const RealMatrix& right);

}  // namespace nugan::dsp

#endif  // NUGAN_DSP_AUDIO_H_
