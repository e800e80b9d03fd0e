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

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "nugan/errors.h"

namespace nugan::dsp {
namespace {

// FFTW planning is not thread-safe; execution with distinct buffers is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

class RealFft {
 public:
  explicit RealFft(int n)
      : n_(n),
        real_(fftw_alloc_real(static_cast<std::size_t>(n))),
        complex_(fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1))) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    forward_ = fftw_plan_dft_r2c_1d(n, real_, complex_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(n, complex_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(complex_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* real() { return real_; }

  // real() -> out[0 .. n/2]
  void Forward(std::complex<double>* out) {
    fftw_execute(forward_);
    for (int k = 0; k <= n_ / 2; ++k) out[k] = {complex_[k][0], complex_[k][1]};
  }

  // in[0 .. n/2] -> real(), scaled by 1/n.
  void Inverse(const std::complex<double>* in) {
    for (int k = 0; k <= n_ / 2; ++k) {
      complex_[k][0] = in[k].real();
      complex_[k][1] = in[k].imag();
    }
    fftw_execute(inverse_);
    const double scale = 1.0 / n_;
    for (int i = 0; i < n_; ++i) real_[i] *= scale;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* complex_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

void CheckConfig(const StftConfig& config) {
  if (config.n_fft < 2 || config.n_fft % 2 != 0) {
    throw ConfigError("n_fft must be even and >= 2, got " + std::to_string(config.n_fft));
  }
  if (config.hop < 1 || config.hop > config.n_fft) {
    throw ConfigError("hop must be in [1, n_fft], got " + std::to_string(config.hop));
  }
}

// Squared window summed over hop shifts must be flat for the least-squares
// overlap-add to reduce to a constant normalization.
void CheckOverlapAdd(const std::vector<double>& window, int hop) {
  const int n = static_cast<int>(window.size());
  double lo = INFINITY;
  double hi = 0.0;
  for (int i = 0; i < hop; ++i) {
    double acc = 0.0;
    for (int j = i; j < n; j += hop) acc += window[j] * window[j];
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  if (!(lo > 0.0) || (hi - lo) > 1e-6 * hi) {
    throw ConfigError("window of length " + std::to_string(n) + " with hop " +
                      std::to_string(hop) +
                      " violates the overlap-add constant condition");
  }
}

}  // namespace

std::vector<double> MakeWindow(WindowKind kind, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  switch (kind) {
    case WindowKind::kHann:
      for (int i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
      }
      break;
  }
  return w;
}

std::size_t NumFrames(std::size_t length, int hop) {
  return 1 + length / static_cast<std::size_t>(hop);
}

ComplexSpectrogram Stft(const AudioBuffer& audio, const StftConfig& config) {
  CheckConfig(config);
  const std::size_t n_fft = static_cast<std::size_t>(config.n_fft);
  const std::size_t len = audio.samples.size();
  if (len < n_fft) {
    throw DataError("stft: audio has " + std::to_string(len) +
                    " samples, fewer than n_fft=" + std::to_string(n_fft));
  }
  const std::size_t pad = n_fft / 2;
  std::vector<double> padded(len + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    padded[pad - 1 - i] = audio.samples[i + 1];
    padded[pad + len + i] = audio.samples[len - 2 - i];
  }
  std::copy(audio.samples.begin(), audio.samples.end(), padded.begin() + static_cast<std::ptrdiff_t>(pad));

  ComplexSpectrogram spec;
  spec.frames = NumFrames(len, config.hop);
  spec.bins = n_fft / 2 + 1;
  spec.data.resize(spec.frames * spec.bins);
  spec.layout = StftLayout{config, len, audio.sample_rate};

  const auto window = MakeWindow(config.window, config.n_fft);
  RealFft fft(config.n_fft);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const double* frame = padded.data() + t * static_cast<std::size_t>(config.hop);
    double* in = fft.real();
    for (std::size_t i = 0; i < n_fft; ++i) in[i] = frame[i] * window[i];
    fft.Forward(&spec.data[t * spec.bins]);
  }
  return spec;
}

AudioBuffer Istft(const ComplexSpectrogram& spec) {
  const StftConfig& config = spec.layout.config;
  CheckConfig(config);
  const std::size_t n_fft = static_cast<std::size_t>(config.n_fft);
  if (spec.bins != n_fft / 2 + 1 || spec.data.size() != spec.frames * spec.bins) {
    throw DimensionError("istft: spectrogram has " + std::to_string(spec.bins) +
                         " bins, expected " + std::to_string(n_fft / 2 + 1));
  }
  const auto window = MakeWindow(config.window, config.n_fft);
  CheckOverlapAdd(window, config.hop);

  const std::size_t hop = static_cast<std::size_t>(config.hop);
  const std::size_t total = (spec.frames - 1) * hop + n_fft;
  std::vector<double> acc(total, 0.0);
  std::vector<double> norm(total, 0.0);
  RealFft fft(config.n_fft);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    fft.Inverse(&spec.data[t * spec.bins]);
    const double* frame = fft.real();
    for (std::size_t i = 0; i < n_fft; ++i) {
      acc[t * hop + i] += frame[i] * window[i];
      norm[t * hop + i] += window[i] * window[i];
    }
  }
  const std::size_t pad = n_fft / 2;
  std::size_t length = spec.layout.signal_length;
  if (length == 0) length = (spec.frames - 1) * hop;
  length = std::min(length, total - pad);
  AudioBuffer out{std::vector<double>(length, 0.0), spec.layout.sample_rate};
  for (std::size_t i = 0; i < length; ++i) {
    const double w = norm[pad + i];
    out.samples[i] = w > 1e-11 ? acc[pad + i] / w : 0.0;
  }
  return out;
}

}  // namespace nugan::dsp
