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

// Integer-factor band-limited resampling with a truncated windowed-sinc
// realization of Whittaker-Shannon interpolation.

#ifndef NUGAN_DSP_RESAMPLE_H_
#define NUGAN_DSP_RESAMPLE_H_

#include <vector>

#include "nugan/dsp/audio.h"

namespace nugan::dsp {

struct SincFilterDesign {
  int taps = 129;
  double kaiser_beta = 8.6;
  // Cutoff as a fraction of the lower rate's Nyquist frequency.
  double cutoff_scale = 0.9;
};

// Low-pass taps at the higher rate for a rate change of `factor`, unity DC
// gain. Length is design.taps (odd, linear phase).
std::vector<double> DesignResamplingFilter(int factor,
                                           const SincFilterDesign& design = {});

// Zero insertion followed by the low-pass at the original Nyquist. Output is
// time-aligned with the input (group delay removed), factor x longer, and at
// factor x the rate.
AudioBuffer SincUpsample(const AudioBuffer& audio, int factor,
                         const SincFilterDesign& design = {});

// Anti-alias low-pass at the new Nyquist, then keep every factor-th sample.
// Trailing samples beyond a multiple of factor are dropped.
AudioBuffer Downsample(const AudioBuffer& audio, int factor,
                       const SincFilterDesign& design = {});

}  // namespace nugan::dsp

#endif  // NUGAN_DSP_RESAMPLE_H_
