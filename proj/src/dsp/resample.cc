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

#include "nugan/dsp/resample.h"

#include <cmath>
#include <numbers>
#include <string>

#include "nugan/errors.h"

namespace nugan::dsp {
namespace {

void CheckFactor(int factor) {
  if (factor < 2) {
    throw ConfigError("resampling factor must be >= 2, got " + std::to_string(factor));
  }
}

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// y[i] = sum_j h[j] * x[i + center - j], zero outside the signal.
std::vector<double> FilterCentered(const std::vector<double>& x,
                                   const std::vector<double>& h) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto taps = static_cast<std::ptrdiff_t>(h.size());
  const std::ptrdiff_t center = taps / 2;
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t j_lo = std::max<std::ptrdiff_t>(0, i + center - (n - 1));
    const std::ptrdiff_t j_hi = std::min<std::ptrdiff_t>(taps - 1, i + center);
    double acc = 0.0;
    for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) acc += h[j] * x[i + center - j];
    y[i] = acc;
  }
  return y;
}

}  // namespace

std::vector<double> DesignResamplingFilter(int factor, const SincFilterDesign& design) {
  CheckFactor(factor);
  if (design.taps < 3 || design.taps % 2 == 0) {
    throw ConfigError("filter taps must be odd and >= 3, got " +
                      std::to_string(design.taps));
  }
  // cycles/sample at the higher rate
  const double cutoff = design.cutoff_scale * 0.5 / factor;
  const int center = design.taps / 2;
  const double norm = std::cyl_bessel_i(0.0, design.kaiser_beta);
  std::vector<double> h(static_cast<std::size_t>(design.taps));
  double total = 0.0;
  for (int n = 0; n < design.taps; ++n) {
    const double r = static_cast<double>(n - center) / center;
    const double window =
        std::cyl_bessel_i(0.0, design.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) /
        norm;
    h[n] = 2.0 * cutoff * Sinc(2.0 * cutoff * (n - center)) * window;
    total += h[n];
  }
  for (auto& v : h) v /= total;
  return h;
}

AudioBuffer SincUpsample(const AudioBuffer& audio, int factor,
                         const SincFilterDesign& design) {
  CheckFactor(factor);
  if (audio.samples.empty()) throw DataError("sinc_upsample: empty input");
  auto h = DesignResamplingFilter(factor, design);
  for (auto& v : h) v *= factor;
  std::vector<double> stuffed(audio.samples.size() * factor, 0.0);
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    stuffed[i * factor] = audio.samples[i];
  }
  return AudioBuffer{FilterCentered(stuffed, h), audio.sample_rate * factor};
}

AudioBuffer Downsample(const AudioBuffer& audio, int factor,
                       const SincFilterDesign& design) {
  CheckFactor(factor);
  if (audio.sample_rate % factor != 0) {
    throw ConfigError("sample rate " + std::to_string(audio.sample_rate) +
                      " is not divisible by " + std::to_string(factor));
  }
  const std::size_t out_len = audio.samples.size() / factor;
  if (out_len == 0) throw DataError("downsample: input shorter than the factor");
  std::vector<double> trimmed(audio.samples.begin(),
                              audio.samples.begin() +
                                  static_cast<std::ptrdiff_t>(out_len * factor));
  const auto filtered = FilterCentered(trimmed, DesignResamplingFilter(factor, design));
  AudioBuffer out{std::vector<double>(out_len), audio.sample_rate / factor};
  for (std::size_t i = 0; i < out_len; ++i) out.samples[i] = filtered[i * factor];
  return out;
}

}  // namespace nugan::dsp
