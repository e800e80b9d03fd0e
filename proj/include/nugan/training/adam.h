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

#ifndef NUGAN_TRAINING_ADAM_H_
#define NUGAN_TRAINING_ADAM_H_

#include <cstdint>
#include <vector>

#include "nugan/tensor.h"

namespace nugan::training {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moments are kept in parameter-list order.
template <typename T>
struct AdamState {
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  std::uint64_t t = 0;
};

template <typename T>
AdamState<T> MakeAdamState(const ParameterList<T>& params);

// Bias-corrected Adam on each parameter's accumulated gradient (missing
// gradients count as zero). Throws NumericError naming the first parameter
// with a non-finite gradient; nothing is modified in that case.
template <typename T>
void AdamStep(ParameterList<T>& params, AdamState<T>& state, const AdamConfig& config);

// Global L2 norm of the accumulated gradients.
template <typename T>
double GradNorm(const ParameterList<T>& params);

// Scales all gradients so the global norm is at most max_norm.
template <typename T>
void ClipGradNorm(ParameterList<T>& params, double max_norm);

}  // namespace nugan::training

#endif  // NUGAN_TRAINING_ADAM_H_
