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

#ifndef NUGAN_TRAINING_LOSSES_H_
#define NUGAN_TRAINING_LOSSES_H_

#include <vector>

#include "nugan/tensor.h"

namespace nugan::training {

// Mean over discriminators of mean(relu(1 - real)) + mean(relu(1 + fake)).
template <typename T>
Tensor<T> HingeDLoss(const std::vector<Tensor<T>>& real_logits,
                     const std::vector<Tensor<T>>& fake_logits);

// Mean over discriminators of mean(-fake).
template <typename T>
Tensor<T> HingeGLoss(const std::vector<Tensor<T>>& fake_logits);

// [discriminator][layer] feature maps; mean |fake - real| per map, averaged
// over every map. Real features are detached.
template <typename T>
Tensor<T> FeatureMatchingLoss(const std::vector<std::vector<Tensor<T>>>& real_features,
                              const std::vector<std::vector<Tensor<T>>>& fake_features);

}  // namespace nugan::training

#endif  // NUGAN_TRAINING_LOSSES_H_
