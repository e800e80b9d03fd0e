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

#include "nugan/dsp/audio.h"

#include <cmath>
#include <string>

#include "nugan/errors.h"

namespace nugan::dsp {

void ValidateAudio(const AudioBuffer& audio) {
  if (audio.sample_rate <= 0) {
    throw DataError("sample rate must be positive, got " +
                    std::to_string(audio.sample_rate));
  }
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    if (!std::isfinite(audio.samples[i])) {
      throw DataError("non-finite sample at index " + std::to_string(i));
    }
  }
}

RealMatrix SliceColumns(const RealMatrix& m, std::size_t start, std::size_t count) {
  if (start + count > m.cols) {
    throw DimensionError("column slice [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") exceeds " +
                         std::to_string(m.cols) + " columns");
  }
  RealMatrix out(m.rows, count);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = m(r, start + c);
  }
  return out;
}

RealMatrix SliceRows(const RealMatrix& m, std::size_t start, std::size_t count) {
  if (start + count > m.rows) {
    throw DimensionError("row slice [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") exceeds " +
                         std::to_string(m.rows) + " rows");
  }
  RealMatrix out(count, m.cols);
  std::copy(m.data.begin() + static_cast<std::ptrdiff_t>(start * m.cols),
            m.data.begin() + static_cast<std::ptrdiff_t>((start + count) * m.cols),
            out.data.begin());
  return out;
}

RealMatrix ConcatColumns(const RealMatrix& left, const RealMatrix& right) {
  if (left.rows != right.rows) {
    throw DimensionError("frame-count mismatch: " + std::to_string(left.rows) +
                         " vs " + std::to_string(right.rows));
  }
  RealMatrix out(left.rows, left.cols + right.cols);
  for (std::size_t r = 0; r < left.rows; ++r) {
    for (std::size_t c = 0; c < left.cols; ++c) out(r, c) = left(r, c);
    for (std::size_t c = 0; c < right.cols; ++c) out(r, left.cols + c) = right(r, c);
  }
  return out;
}

}  // namespace nugan::dsp
