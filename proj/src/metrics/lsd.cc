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

#include <algorithm>
#include <cmath>
#include <string>

#include "nugan/errors.h"
#include "nugan/metrics.h"

namespace nugan::metrics {
namespace {

std::vector<double> LogPower(const dsp::ComplexSpectrogram& spec, double floor) {
  std::vector<double> out(spec.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::log10(std::max(std::norm(spec.data[i]), floor));
  }
  return out;
}

}  // namespace

double Lsd(const dsp::AudioBuffer& reference, const dsp::AudioBuffer& approx,
           const LsdConfig& config) {
  if (reference.sample_rate != approx.sample_rate) {
    throw DataError("lsd: sample-rate mismatch " + std::to_string(reference.sample_rate) +
                    " vs " + std::to_string(approx.sample_rate));
  }
  const std::size_t length = std::min(reference.size(), approx.size());
  if (length < static_cast<std::size_t>(config.n_fft)) {
    throw DataError("lsd: audio has " + std::to_string(length) +
                    " samples, fewer than n_fft=" + std::to_string(config.n_fft));
  }
  auto trim = [length](const dsp::AudioBuffer& a) {
    return dsp::AudioBuffer{
        std::vector<double>(a.samples.begin(),
                            a.samples.begin() + static_cast<std::ptrdiff_t>(length)),
        a.sample_rate};
  };
  const dsp::StftConfig stft{config.n_fft, config.hop, config.window};
  const auto x = dsp::Stft(trim(reference), stft);
  const auto y = dsp::Stft(trim(approx), stft);
  const auto lx = LogPower(x, config.power_floor);
  const auto ly = LogPower(y, config.power_floor);
  double total = 0.0;
  for (std::size_t t = 0; t < x.frames; ++t) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.bins; ++k) {
      const double d = lx[t * x.bins + k] - ly[t * x.bins + k];
      sq += d * d;
    }
    total += std::sqrt(sq / static_cast<double>(x.bins));
  }
  return total / static_cast<double>(x.frames);
}

double Snr(const dsp::AudioBuffer& reference, const dsp::AudioBuffer& approx) {
  if (reference.sample_rate != approx.sample_rate || reference.size() != approx.size()) {
    throw DataError("snr: signals must share rate and length (" +
                    std::to_string(reference.size()) + " vs " +
                    std::to_string(approx.size()) + " samples)");
  }
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    signal += reference.samples[i] * reference.samples[i];
    const double e = reference.samples[i] - approx.samples[i];
    noise += e * e;
  }
  if (signal == 0.0) throw DataError("snr: reference is all zeros");
  if (noise == 0.0) return kSnrExact;
  return 10.0 * std::log10(signal / noise);
}

}  // namespace nugan::metrics
