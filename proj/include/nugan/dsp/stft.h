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

#ifndef NUGAN_DSP_STFT_H_
#define NUGAN_DSP_STFT_H_

#include <complex>
#include <cstddef>
#include <vector>

#include "nugan/dsp/audio.h"

namespace nugan::dsp {

inline constexpr int kNumFft = 1024;
inline constexpr int kHop = 256;
inline constexpr std::size_t kNumBins = kNumFft / 2 + 1;  // 513
inline constexpr std::size_t kLowBins = 257;
inline constexpr std::size_t kHighBins = 256;
static_assert(kLowBins + kHighBins == kNumBins);

inline constexpr double kMagnitudeFloor = 1e-5;

enum class WindowKind { kHann };

struct StftConfig {
  int n_fft = kNumFft;
  int hop = kHop;
  WindowKind window = WindowKind::kHann;
};

// Everything istft needs besides the coefficients.
struct StftLayout {
  StftConfig config;
  std::size_t signal_length = 0;
  int sample_rate = 0;
};

struct ComplexSpectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;  // n_fft / 2 + 1
  std::vector<std::complex<double>> data;  // [frames, bins]
  StftLayout layout;

  std::complex<double>& at(std::size_t t, std::size_t f) { return data[t * bins + f]; }
  const std::complex<double>& at(std::size_t t, std::size_t f) const {
    return data[t * bins + f];
  }
};

struct LogMagnitude {
  RealMatrix values;  // natural log of max(|z|, floor)
  double floor = kMagnitudeFloor;
};

struct Phase {
  RealMatrix values;  // radians in (-pi, pi]
  StftLayout layout;
};

struct MagnitudePhase {
  RealMatrix magnitude;
  Phase phase;
};

// Periodic window of length n.
std::vector<double> MakeWindow(WindowKind kind, int n);

// Frame count for a centered STFT: 1 + floor(length / hop).
std::size_t NumFrames(std::size_t length, int hop);

// Reflect-padded, centered STFT. Throws DataError if the audio is shorter than
// n_fft.
ComplexSpectrogram Stft(const AudioBuffer& audio, const StftConfig& config = {});

// Least-squares overlap-add with window-square normalization. Returns
// layout.signal_length samples. Throws ConfigError when the squared window
// does not overlap-add to a constant at the configured hop.
AudioBuffer Istft(const ComplexSpectrogram& spec);

MagnitudePhase SplitMagPhase(const ComplexSpectrogram& spec);
ComplexSpectrogram Recombine(const RealMatrix& magnitude, const Phase& phase);

LogMagnitude ToLogMagnitude(const RealMatrix& magnitude,
                            double floor = kMagnitudeFloor);
RealMatrix FromLogMagnitude(const LogMagnitude& log_magnitude);

struct Reconstruction {
  AudioBuffer audio;
  // Samples clamped to [-1, 1].
  std::size_t clipped = 0;
};

// Joins the low and predicted high log-magnitude bins, restores linear
// magnitude, applies the interpolated audio's phase unchanged, and inverts.
Reconstruction ReconstructFull(const LogMagnitude& low, const LogMagnitude& high,
                               const Phase& phase);

}  // namespace nugan::dsp

#endif  // NUGAN_DSP_STFT_H_
