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

#ifndef NUGAN_MODEL_SPECTRAL_NORM_H_
#define NUGAN_MODEL_SPECTRAL_NORM_H_

#include <cstdint>
#include <random>
#include <vector>

#include "nugan/tensor.h"

namespace nugan::model {

inline constexpr double kSigmaFloor = 1e-12;

// Left singular vector estimate for a weight viewed as [out, rest].
template <typename T>
struct SpectralNormState {
  std::vector<T> u;
  int power_iterations = 1;
};

// Random unit u followed by `warmup` power iterations on `weight`.
template <typename T>
SpectralNormState<T> InitSpectralNormState(const Tensor<T>& weight,
                                           std::mt19937_64& rng, int warmup);

// Returns weight / sigma_hat, where sigma_hat = u^T W v with v = W^T u / |W^T u|.
// With `update`, state.power_iterations power steps refresh u first. u and v
// are treated as constants for differentiation.
template <typename T>
Tensor<T> SpectralNormalize(const Tensor<T>& weight, SpectralNormState<T>& state,
                            bool update);

// sigma_hat for the current u, without touching the state.
template <typename T>
T EstimateSigma(const Tensor<T>& weight, const SpectralNormState<T>& state);

}  // namespace nugan::model

#endif  // NUGAN_MODEL_SPECTRAL_NORM_H_
