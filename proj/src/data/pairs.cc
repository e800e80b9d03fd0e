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

#include "nugan/data/pairs.h"

#include "nugan/dsp/resample.h"
#include "nugan/errors.h"

namespace nugan::data {

InterpolatedFeatures AnalyzeLowRate(const dsp::AudioBuffer& low_rate) {
  if (low_rate.sample_rate != dsp::kLowSampleRate) {
    throw DataError("expected " + std::to_string(dsp::kLowSampleRate) +
                    " Hz input, got " + std::to_string(low_rate.sample_rate) + " Hz");
  }
  dsp::ValidateAudio(low_rate);
  InterpolatedFeatures out;
  out.interpolated = dsp::SincUpsample(low_rate, 2);
  auto split = dsp::SplitMagPhase(dsp::Stft(out.interpolated));
  out.low = dsp::ToLogMagnitude(dsp::SliceColumns(split.magnitude, 0, dsp::kLowBins));
  out.phase = std::move(split.phase);
  return out;
}

TrainingExample MakePair(const dsp::AudioBuffer& high, const std::string& source,
                         std::size_t offset) {
  if (high.sample_rate != dsp::kHighSampleRate) {
    throw DataError(source + ": expected " + std::to_string(dsp::kHighSampleRate) +
                    " Hz audio, got " + std::to_string(high.sample_rate) + " Hz");
  }
  if (high.size() < static_cast<std::size_t>(dsp::kNumFft)) {
    throw DataError(source + ": audio has " + std::to_string(high.size()) +
                    " samples, need at least " + std::to_string(dsp::kNumFft));
  }
  dsp::AudioBuffer truth = high;
  truth.samples.resize(truth.size() & ~std::size_t{1});
  dsp::ValidateAudio(truth);

  const auto features = AnalyzeLowRate(dsp::Downsample(truth, 2));
  const auto real = dsp::SplitMagPhase(dsp::Stft(truth));

  TrainingExample ex;
  ex.low = features.low;
  ex.high_real = dsp::ToLogMagnitude(
      dsp::SliceColumns(real.magnitude, dsp::kLowBins, dsp::kHighBins));
  ex.phase_full = features.phase;
  ex.source = source;
  ex.offset = offset;
  if (ex.low.values.rows != ex.high_real.values.rows ||
      ex.low.values.rows != ex.phase_full.values.rows) {
    throw DimensionError(source + ": frame counts disagree between paths");
  }
  return ex;
}

}  // namespace nugan::data
