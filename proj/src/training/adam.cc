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

#include "nugan/training/adam.h"

#include <cmath>
#include <string>

#include "nugan/errors.h"

namespace nugan::training {

template <typename T>
AdamState<T> MakeAdamState(const ParameterList<T>& params) {
  AdamState<T> state;
  for (const auto& p : params) {
    state.m.emplace_back(p.tensor.numel(), T(0));
    state.v.emplace_back(p.tensor.numel(), T(0));
  }
  return state;
}

template <typename T>
void AdamStep(ParameterList<T>& params, AdamState<T>& state, const AdamConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError("optimizer state covers " + std::to_string(state.m.size()) +
                         " parameters, list has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (state.m[i].size() != p.tensor.numel()) {
      throw DimensionError("optimizer state for " + p.name + " has " +
                           std::to_string(state.m[i].size()) + " entries, parameter has " +
                           std::to_string(p.tensor.numel()));
    }
    if (!p.tensor.has_grad()) continue;
    for (T g : p.tensor.grad()) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in parameter " + p.name);
      }
    }
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& tensor = params[i].tensor;
    auto& m = state.m[i];
    auto& v = state.v[i];
    auto w = tensor.mutable_data();
    const bool has_grad = tensor.has_grad();
    const auto g = tensor.grad();
    for (std::size_t j = 0; j < w.size(); ++j) {
      // Recurrences in double so (1 - beta) matches the bias corrections.
      const double gj = has_grad ? static_cast<double>(g[j]) : 0.0;
      m[j] = static_cast<T>(config.beta1 * m[j] + (1.0 - config.beta1) * gj);
      v[j] = static_cast<T>(config.beta2 * v[j] + (1.0 - config.beta2) * gj * gj);
      const double m_hat = static_cast<double>(m[j]) / c1;
      const double v_hat = static_cast<double>(v[j]) / c2;
      w[j] -= static_cast<T>(config.lr * m_hat / (std::sqrt(v_hat) + config.eps));
    }
  }
}

template <typename T>
double GradNorm(const ParameterList<T>& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) continue;
    for (T g : p.tensor.grad()) sq += static_cast<double>(g) * g;
  }
  return std::sqrt(sq);
}

template <typename T>
void ClipGradNorm(ParameterList<T>& params, double max_norm) {
  const double norm = GradNorm(params);
  if (!(norm > max_norm) || !std::isfinite(norm)) return;
  const T scale = static_cast<T>(max_norm / norm);
  for (auto& p : params) {
    if (!p.tensor.has_grad()) continue;
    for (auto& g : p.tensor.mutable_grad()) g *= scale;
  }
}

#define NUGAN_INSTANTIATE(T)                                                   \
  template AdamState<T> MakeAdamState(const ParameterList<T>&);                \
  template void AdamStep(ParameterList<T>&, AdamState<T>&, const AdamConfig&); \
  template double GradNorm(const ParameterList<T>&);                           \
  template void ClipGradNorm(ParameterList<T>&, double);
NUGAN_INSTANTIATE(float)
NUGAN_INSTANTIATE(double)
#undef NUGAN_INSTANTIATE

}  // namespace nugan::training
