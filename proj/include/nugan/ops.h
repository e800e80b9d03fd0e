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

#ifndef NUGAN_OPS_H_
#define NUGAN_OPS_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "nugan/tensor.h"

namespace nugan {

// Binary ops require equal shapes, or one operand with a single element which
// is broadcast. No other broadcasting is performed.
template <typename T> Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> Div(const Tensor<T>& a, const Tensor<T>& b);

template <typename T> Tensor<T> Neg(const Tensor<T>& a);
template <typename T> Tensor<T> Exp(const Tensor<T>& a);
// Throws NumericError on any non-positive entry.
template <typename T> Tensor<T> Log(const Tensor<T>& a);
template <typename T> Tensor<T> Abs(const Tensor<T>& a);
template <typename T> Tensor<T> Relu(const Tensor<T>& a);
template <typename T> Tensor<T> LeakyRelu(const Tensor<T>& a, T slope = T(0.2));
// Exact (erf) form.
template <typename T> Tensor<T> Gelu(const Tensor<T>& a);
template <typename T> Tensor<T> MaxWithScalar(const Tensor<T>& a, T floor);
template <typename T> Tensor<T> Scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> AddScalar(const Tensor<T>& a, T offset);

// [m,k] x [k,n] -> [m,n].
template <typename T> Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b);

// x: [..., n], bias: [n].
template <typename T> Tensor<T> BiasAdd(const Tensor<T>& x, const Tensor<T>& bias);

// x: [rows, in], weight: [in, out], bias: [out].
template <typename T>
Tensor<T> Linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

// Sum/mean over every element (rank-0 result) or over one axis (axis removed).
template <typename T> Tensor<T> Sum(const Tensor<T>& a);
template <typename T> Tensor<T> Sum(const Tensor<T>& a, std::size_t axis);
template <typename T> Tensor<T> Mean(const Tensor<T>& a);
template <typename T> Tensor<T> Mean(const Tensor<T>& a, std::size_t axis);

template <typename T> Tensor<T> Softmax(const Tensor<T>& a, std::size_t axis);

// Normalizes over the last axis; gain and shift have the last axis' length.
template <typename T>
Tensor<T> LayerNorm(const Tensor<T>& a, const Tensor<T>& gain,
                    const Tensor<T>& shift, T eps = T(1e-5));

template <typename T> Tensor<T> Reshape(const Tensor<T>& a, Shape shape);
template <typename T>
Tensor<T> Transpose(const Tensor<T>& a, std::size_t axis0, std::size_t axis1);
template <typename T>
Tensor<T> Slice(const Tensor<T>& a, std::size_t axis, std::size_t start,
                std::size_t length);
template <typename T>
Tensor<T> Concat(const std::vector<Tensor<T>>& parts, std::size_t axis);

struct Conv1dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t groups = 1;
};

// input: [C_in, T] or [B, C_in, T]; weight: [C_out, C_in/groups, k];
// bias: [C_out] or undefined. Zero padding on both ends of the time axis.
// Output: [.., C_out, floor((T + 2p - k)/stride) + 1].
template <typename T>
Tensor<T> Conv1dGrouped(const Tensor<T>& input, const Tensor<T>& weight,
                        const Tensor<T>& bias, const Conv1dOptions& options);

std::size_t Conv1dOutputLength(std::size_t length, std::size_t kernel,
                               std::size_t stride, std::size_t padding);

}  // namespace nugan

#endif  // NUGAN_OPS_H_
