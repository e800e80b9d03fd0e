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

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "nugan/data/pairs.h"
#include "nugan/dsp/resample.h"
#include "nugan/errors.h"
#include "nugan/metrics.h"

namespace nugan::metrics {
namespace {

// Sample standard deviation (n - 1); 0 for a single file.
std::pair<double, double> MeanStd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  if (xs.size() < 2) return {mean, 0.0};
  return {mean, std::sqrt(var / static_cast<double>(xs.size() - 1))};
}

std::string ModeLabel(EvalMode mode) {
  switch (mode) {
    case EvalMode::kBaseline: return "baseline";
    case EvalMode::kModel: return "model";
    case EvalMode::kOracle: return "oracle";
  }
  return "unknown";
}

dsp::AudioBuffer Approximate(const dsp::AudioBuffer& truth, const dsp::AudioBuffer& low,
                             EvalMode mode, const inference::Upsampler* upsampler) {
  switch (mode) {
    case EvalMode::kBaseline:
      return dsp::SincUpsample(low, 2);
    case EvalMode::kModel:
      return upsampler->Upsample(low).audio;
    case EvalMode::kOracle: {
      const auto features = data::AnalyzeLowRate(low);
      const auto real = dsp::SplitMagPhase(dsp::Stft(truth));
      const auto high = dsp::ToLogMagnitude(
          dsp::SliceColumns(real.magnitude, dsp::kLowBins, dsp::kHighBins));
      return dsp::ReconstructFull(features.low, high, features.phase).audio;
    }
  }
  throw ConfigError("unknown evaluation mode");
}

}  // namespace

CorpusReport EvaluateCorpus(const std::vector<data::CorpusItem>& heldout,
                            const std::vector<std::string>& train_paths, EvalMode mode,
                            const inference::Upsampler* upsampler,
                            const LsdConfig& config) {
  if (heldout.empty()) throw DataError("held-out set is empty");
  if (mode == EvalMode::kModel && (upsampler == nullptr || upsampler->bypass())) {
    throw ConfigError("model evaluation needs an upsampler with a generator");
  }
  const std::set<std::string> train(train_paths.begin(), train_paths.end());
  CorpusReport report;
  report.label = ModeLabel(mode);
  for (const auto& item : heldout) {
    if (train.count(item.path) != 0) {
      throw DataError(item.path + " is in both the train and held-out splits");
    }
    auto truth = data::LoadAudio(item);
    if (truth.sample_rate != dsp::kHighSampleRate) {
      throw DataError(item.path + ": expected " + std::to_string(dsp::kHighSampleRate) +
                      " Hz, got " + std::to_string(truth.sample_rate) + " Hz");
    }
    truth.samples.resize(truth.size() & ~std::size_t{1});
    const auto low = dsp::Downsample(truth, 2);
    const auto approx = Approximate(truth, low, mode, upsampler);
    report.lsd_per_file.push_back(Lsd(truth, approx, config));
    report.snr_per_file.push_back(Snr(truth, approx));
  }
  report.n_files = heldout.size();
  std::tie(report.lsd_mean, report.lsd_std) = MeanStd(report.lsd_per_file);
  std::tie(report.snr_mean, report.snr_std) = MeanStd(report.snr_per_file);
  return report;
}

std::string FormatReport(const CorpusReport& report) {
  return fmt::format(
      "{:<10} | LSD {:.4f} ± {:.4f} | SNR {:.2f} ± {:.2f} dB | files {}\n"
      "lsd_mean={:.6f} lsd_std={:.6f} snr_mean={:.4f} snr_std={:.4f} n_files={}\n",
      report.label, report.lsd_mean, report.lsd_std, report.snr_mean, report.snr_std,
      report.n_files, report.lsd_mean, report.lsd_std, report.snr_mean, report.snr_std,
      report.n_files);
}

}  // namespace nugan::metrics
