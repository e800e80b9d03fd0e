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

#include "nugan/training/losses.h"

#include <string>

#include "nugan/errors.h"
#include "nugan/ops.h"

namespace nugan::training {
namespace {

template <typename T>
Tensor<T> MeanOf(const std::vector<Tensor<T>>& terms) {
  Tensor<T> total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total = Add(total, terms[i]);
  return Scale(total, static_cast<T>(1.0 / static_cast<double>(terms.size())));
}

}  // namespace

template <typename T>
Tensor<T> HingeDLoss(const std::vector<Tensor<T>>& real_logits,
                     const std::vector<Tensor<T>>& fake_logits) {
  if (real_logits.empty() || fake_logits.empty()) {
    throw DimensionError("hinge loss needs at least one discriminator output");
  }
  if (real_logits.size() != fake_logits.size()) {
    throw DimensionError("hinge loss got " + std::to_string(real_logits.size()) +
                         " real and " + std::to_string(fake_logits.size()) +
                         " fake logit sets");
  }
  std::vector<Tensor<T>> terms;
  for (std::size_t i = 0; i < real_logits.size(); ++i) {
    const auto real = Mean(Relu(AddScalar(Neg(real_logits[i]), T(1))));
    const auto fake = Mean(Relu(AddScalar(fake_logits[i], T(1))));
    terms.push_back(Add(real, fake));
  }
  return MeanOf(terms);
}

template <typename T>
Tensor<T> HingeGLoss(const std::vector<Tensor<T>>& fake_logits) {
  if (fake_logits.empty()) {
    throw DimensionError("hinge loss needs at least one discriminator output");
  }
  std::vector<Tensor<T>> terms;
  for (const auto& logits : fake_logits) terms.push_back(Neg(Mean(logits)));
  return MeanOf(terms);
}

template <typename T>
Tensor<T> FeatureMatchingLoss(const std::vector<std::vector<Tensor<T>>>& real_features,
                              const std::vector<std::vector<Tensor<T>>>& fake_features) {
  if (real_features.empty() || real_features.size() != fake_features.size()) {
    throw DimensionError("feature matching got " + std::to_string(real_features.size()) +
                         " real and " + std::to_string(fake_features.size()) +
                         " fake discriminator feature sets");
  }
  std::vector<Tensor<T>> terms;
  for (std::size_t d = 0; d < real_features.size(); ++d) {
    const auto& real = real_features[d];
    const auto& fake = fake_features[d];
    if (real.empty() || real.size() != fake.size()) {
      throw DimensionError("feature matching: discriminator " + std::to_string(d) +
                           " has " + std::to_string(real.size()) + " real and " +
                           std::to_string(fake.size()) + " fake layers");
    }
    for (std::size_t l = 0; l < real.size(); ++l) {
      if (real[l].shape() != fake[l].shape()) {
        throw DimensionError("feature matching: layer " + std::to_string(l) +
                             " shapes " + ShapeToString(real[l].shape()) + " vs " +
                             ShapeToString(fake[l].shape()));
      }
      terms.push_back(Mean(Abs(Sub(fake[l], real[l].detach()))));
    }
  }
  return MeanOf(terms);
}

#define NUGAN_INSTANTIATE(T)                                                       \
  template Tensor<T> HingeDLoss(const std::vector<Tensor<T>>&,                     \
                                const std::vector<Tensor<T>>&);                    \
  template Tensor<T> HingeGLoss(const std::vector<Tensor<T>>&);                    \
  template Tensor<T> FeatureMatchingLoss(const std::vector<std::vector<Tensor<T>>>&, \
                                         const std::vector<std::vector<Tensor<T>>>&);
NUGAN_INSTANTIATE(float)
NUGAN_INSTANTIATE(double)
#undef NUGAN_INSTANTIATE

}  // namespace nugan::training
