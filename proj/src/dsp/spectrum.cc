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

#include "nugan/dsp/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nugan/errors.h"

namespace nugan::dsp {

MagnitudePhase SplitMagPhase(const ComplexSpectrogram& spec) {
  MagnitudePhase out{RealMatrix(spec.frames, spec.bins),
                     Phase{RealMatrix(spec.frames, spec.bins), spec.layout}};
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    const auto z = spec.data[i];
    out.magnitude.data[i] = std::abs(z);
    double angle = (z == std::complex<double>(0.0, 0.0)) ? 0.0 : std::arg(z);
    if (angle <= -std::numbers::pi) angle = std::numbers::pi;
    out.phase.values.data[i] = angle;
  }
  return out;
}

ComplexSpectrogram Recombine(const RealMatrix& magnitude, const Phase& phase) {
  if (magnitude.rows != phase.values.rows || magnitude.cols != phase.values.cols) {
    throw DimensionError("magnitude [" + std::to_string(magnitude.rows) + ", " +
                         std::to_string(magnitude.cols) + "] vs phase [" +
                         std::to_string(phase.values.rows) + ", " +
                         std::to_string(phase.values.cols) + "]");
  }
  ComplexSpectrogram spec;
  spec.frames = magnitude.rows;
  spec.bins = magnitude.cols;
  spec.layout = phase.layout;
  spec.data.resize(magnitude.data.size());
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    spec.data[i] = std::polar(magnitude.data[i], phase.values.data[i]);
  }
  return spec;
}

LogMagnitude ToLogMagnitude(const RealMatrix& magnitude, double floor) {
  LogMagnitude out{RealMatrix(magnitude.rows, magnitude.cols), floor};
  for (std::size_t i = 0; i < magnitude.data.size(); ++i) {
    out.values.data[i] = std::log(std::max(magnitude.data[i], floor));
  }
  return out;
}

RealMatrix FromLogMagnitude(const LogMagnitude& log_magnitude) {
  RealMatrix out(log_magnitude.values.rows, log_magnitude.values.cols);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = std::exp(log_magnitude.values.data[i]);
  }
  return out;
}

Reconstruction ReconstructFull(const LogMagnitude& low, const LogMagnitude& high,
                               const Phase& phase) {
  if (low.values.rows != high.values.rows || low.values.rows != phase.values.rows) {
    throw DimensionError("frame-count mismatch: low " + std::to_string(low.values.rows) +
                         ", high " + std::to_string(high.values.rows) + ", phase " +
                         std::to_string(phase.values.rows));
  }
  if (low.values.cols + high.values.cols != phase.values.cols) {
    throw DimensionError("bin-count mismatch: " + std::to_string(low.values.cols) +
                         " + " + std::to_string(high.values.cols) +
                         " != " + std::to_string(phase.values.cols));
  }
  const LogMagnitude full{ConcatColumns(low.values, high.values), low.floor};
  Reconstruction out{Istft(Recombine(FromLogMagnitude(full), phase)), 0};
  for (auto& s : out.audio.samples) {
    if (s > 1.0 || s < -1.0) {
      s = std::clamp(s, -1.0, 1.0);
      ++out.clipped;
    }
  }
  return out;
}

}  // namespace nugan::dsp
