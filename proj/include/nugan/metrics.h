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

#ifndef NUGAN_METRICS_H_
#define NUGAN_METRICS_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nugan/data/corpus.h"
#include "nugan/dsp/audio.h"
#include "nugan/dsp/stft.h"
#include "nugan/inference/upsampler.h"

namespace nugan::metrics {

struct LsdConfig {
  int n_fft = 2048;
  int hop = 512;
  dsp::WindowKind window = dsp::WindowKind::kHann;
  double power_floor = 1e-10;
};

// Log-spectral distance in log10-power units: per-frame RMS over bins of
// log10(max(|S|^2, floor)) differences, averaged over frames. Lengths are
// trimmed to the shorter signal; rates must match.
double Lsd(const dsp::AudioBuffer& reference, const dsp::AudioBuffer& approx,
           const LsdConfig& config = {});

inline constexpr double kSnrExact = std::numeric_limits<double>::infinity();

// 10 log10(|x|^2 / |x - y|^2) in dB; kSnrExact when the signals are equal.
double Snr(const dsp::AudioBuffer& reference, const dsp::AudioBuffer& approx);

struct CorpusReport {
  std::string label;
  double lsd_mean = 0.0;
  double lsd_std = 0.0;
  double snr_mean = 0.0;
  double snr_std = 0.0;
  std::size_t n_files = 0;
  std::vector<double> lsd_per_file;
  std::vector<double> snr_per_file;
};

enum class EvalMode {
  kBaseline,  // sinc interpolation only
  kModel,     // generator-predicted high bins
  kOracle,    // ground-truth high bins with interpolated phase
};

// Runs the full upsampling pipeline on every held-out file: decimate the
// 44.1 kHz reference, upsample it back, and score against the reference.
// Throws DataError if any held-out path also appears in `train_paths`.
CorpusReport EvaluateCorpus(const std::vector<data::CorpusItem>& heldout,
                            const std::vector<std::string>& train_paths,
                            EvalMode mode, const inference::Upsampler* upsampler,
                            const LsdConfig& config = {});

// Two lines: a table row and `lsd_mean=... lsd_std=... snr_mean=... snr_std=... n_files=...`.
std::string FormatReport(const CorpusReport& report);

}  // namespace nugan::metrics

#endif  // NUGAN_METRICS_H_
