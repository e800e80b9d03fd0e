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

#include "nugan/model/spectral_norm.h"

#include <cmath>

#include "nugan/errors.h"
#include "nugan/ops.h"

namespace nugan::model {
namespace {

struct MatrixView {
  std::size_t rows;
  std::size_t cols;
};

template <typename T>
MatrixView ViewOf(const Tensor<T>& weight) {
  if (weight.rank() < 2) {
    throw DimensionError("spectral norm needs a weight of rank >= 2, got " +
                         ShapeToString(weight.shape()));
  }
  return {weight.dim(0), weight.numel() / weight.dim(0)};
}

// Normalizes in place; returns the norm before scaling.
double Normalize(std::vector<double>& x) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  const double scale = 1.0 / std::max(norm, kSigmaFloor);
  for (auto& v : x) v *= scale;
  return norm;
}

template <typename T>
std::vector<double> RightVector(const Tensor<T>& weight, const std::vector<double>& u,
                                MatrixView view) {
  const auto w = weight.data();
  std::vector<double> v(view.cols, 0.0);
  for (std::size_t r = 0; r < view.rows; ++r) {
    const T* row = w.data() + r * view.cols;
    for (std::size_t c = 0; c < view.cols; ++c) v[c] += u[r] * row[c];
  }
  Normalize(v);
  return v;
}

template <typename T>
std::vector<double> LeftVector(const Tensor<T>& weight, const std::vector<double>& v,
                               MatrixView view) {
  const auto w = weight.data();
  std::vector<double> u(view.rows, 0.0);
  for (std::size_t r = 0; r < view.rows; ++r) {
    const T* row = w.data() + r * view.cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < view.cols; ++c) acc += row[c] * v[c];
    u[r] = acc;
  }
  Normalize(u);
  return u;
}

template <typename T>
std::vector<double> ToDouble(const std::vector<T>& x) {
  return std::vector<double>(x.begin(), x.end());
}

template <typename T>
void PowerIterate(const Tensor<T>& weight, SpectralNormState<T>& state, int iterations) {
  const MatrixView view = ViewOf(weight);
  auto u = ToDouble(state.u);
  for (int i = 0; i < iterations; ++i) {
    u = LeftVector(weight, RightVector(weight, u, view), view);
  }
  state.u.assign(u.begin(), u.end());
}

template <typename T>
void CheckState(const Tensor<T>& weight, const SpectralNormState<T>& state) {
  if (state.u.size() != weight.dim(0)) {
    throw DimensionError("spectral norm state has " + std::to_string(state.u.size()) +
                         " entries for a weight with " + std::to_string(weight.dim(0)) +
                         " output channels");
  }
}

}  // namespace

template <typename T>
SpectralNormState<T> InitSpectralNormState(const Tensor<T>& weight, std::mt19937_64& rng,
                                           int warmup) {
  const MatrixView view = ViewOf(weight);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(view.rows);
  for (auto& x : u) x = normal(rng);
  Normalize(u);
  SpectralNormState<T> state;
  state.u.assign(u.begin(), u.end());
  PowerIterate(weight, state, warmup);
  return state;
}

template <typename T>
Tensor<T> SpectralNormalize(const Tensor<T>& weight, SpectralNormState<T>& state,
                            bool update) {
  CheckState(weight, state);
  const MatrixView view = ViewOf(weight);
  if (update) PowerIterate(weight, state, state.power_iterations);
  const auto u = ToDouble(state.u);
  const auto v = RightVector(weight, u, view);
  const Tensor<T> u_col(Shape{view.rows, 1}, std::vector<T>(u.begin(), u.end()));
  const Tensor<T> v_col(Shape{view.cols, 1}, std::vector<T>(v.begin(), v.end()));
  const auto matrix = Reshape(weight, Shape{view.rows, view.cols});
  const auto sigma = MaxWithScalar(Sum(Mul(MatMul(matrix, v_col), u_col)),
                                   static_cast<T>(kSigmaFloor));
  return Div(weight, sigma);
}

template <typename T>
T EstimateSigma(const Tensor<T>& weight, const SpectralNormState<T>& state) {
  CheckState(weight, state);
  const MatrixView view = ViewOf(weight);
  const auto u = ToDouble(state.u);
  const auto v = RightVector(weight, u, view);
  const auto w = weight.data();
  double sigma = 0.0;
  for (std::size_t r = 0; r < view.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < view.cols; ++c) acc += w[r * view.cols + c] * v[c];
    sigma += u[r] * acc;
  }
  return static_cast<T>(std::max(sigma, kSigmaFloor));
}

template SpectralNormState<float> InitSpectralNormState(const Tensor<float>&,
                                                        std::mt19937_64&, int);
template SpectralNormState<double> InitSpectralNormState(const Tensor<double>&,
                                                         std::mt19937_64&, int);
template Tensor<float> SpectralNormalize(const Tensor<float>&, SpectralNormState<float>&,
                                         bool);
template Tensor<double> SpectralNormalize(const Tensor<double>&,
                                          SpectralNormState<double>&, bool);
template float EstimateSigma(const Tensor<float>&, const SpectralNormState<float>&);
template double EstimateSigma(const Tensor<double>&, const SpectralNormState<double>&);

}  // namespace nugan::model
