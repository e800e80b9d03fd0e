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

#include "nugan/ops.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "nugan/errors.h"

namespace nugan {
namespace {

template <typename T>
using NodePtr = std::shared_ptr<internal::Node<T>>;

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;

template <typename T>
bool NeedsRecord(std::initializer_list<const Tensor<T>*> inputs) {
  if (!GradEnabled()) return false;
  for (const auto* t : inputs) {
    if (t->defined() && t->requires_grad()) return true;
  }
  return false;
}

template <typename T, typename F>
void Attach(Tensor<T>& out, std::vector<NodePtr<T>> parents, F backward) {
  const auto& node = out.node();
  node->requires_grad = true;
  node->parents = std::move(parents);
  node->backward = std::move(backward);
  Tape<T>::Current().Record(node);
}

// Extents around `axis`: [outer, axis, inner].
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit SplitAt(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

void CheckAxis(const Shape& shape, std::size_t axis, const char* op) {
  if (axis >= shape.size()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + ShapeToString(shape));
  }
}

template <typename T>
void CheckDefined(const Tensor<T>& t, const char* op) {
  if (!t.defined()) throw DimensionError(std::string(op) + ": undefined tensor");
}

enum class BinaryKind { kAdd, kSub, kMul, kDiv };

const char* BinaryName(BinaryKind kind) {
  switch (kind) {
    case BinaryKind::kAdd: return "add";
    case BinaryKind::kSub: return "sub";
    case BinaryKind::kMul: return "mul";
    case BinaryKind::kDiv: return "div";
  }
  return "?";
}

template <typename T>
Tensor<T> Binary(const Tensor<T>& a, const Tensor<T>& b, BinaryKind kind) {
  CheckDefined(a, BinaryName(kind));
  CheckDefined(b, BinaryName(kind));
  bool a_scalar = false;
  bool b_scalar = false;
  Shape shape;
  if (a.shape() == b.shape()) {
    shape = a.shape();
  } else if (b.numel() == 1) {
    b_scalar = true;
    shape = a.shape();
  } else if (a.numel() == 1) {
    a_scalar = true;
    shape = b.shape();
  } else {
    throw DimensionError(std::string(BinaryName(kind)) + ": shape mismatch " +
                         ShapeToString(a.shape()) + " vs " +
                         ShapeToString(b.shape()));
  }
  const std::size_t n = NumElements(shape);
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<T> value(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T x = av[a_scalar ? 0 : i];
    const T y = bv[b_scalar ? 0 : i];
    switch (kind) {
      case BinaryKind::kAdd: value[i] = x + y; break;
      case BinaryKind::kSub: value[i] = x - y; break;
      case BinaryKind::kMul: value[i] = x * y; break;
      case BinaryKind::kDiv: value[i] = x / y; break;
    }
  }
  Tensor<T> out(std::move(shape), std::move(value));
  if (NeedsRecord({&a, &b})) {
    Attach(out, {a.node(), b.node()},
           [an = a.node(), bn = b.node(), a_scalar, b_scalar, kind,
            n](std::span<const T> g) {
             const bool ga_on = an->requires_grad;
             const bool gb_on = bn->requires_grad;
             std::span<T> ga = ga_on ? an->GradBuffer() : std::span<T>();
             std::span<T> gb = gb_on ? bn->GradBuffer() : std::span<T>();
             const auto& av = an->value;
             const auto& bv = bn->value;
             for (std::size_t i = 0; i < n; ++i) {
               const std::size_t ia = a_scalar ? 0 : i;
               const std::size_t ib = b_scalar ? 0 : i;
               T da = 0;
               T db = 0;
               switch (kind) {
                 case BinaryKind::kAdd: da = g[i]; db = g[i]; break;
                 case BinaryKind::kSub: da = g[i]; db = -g[i]; break;
                 case BinaryKind::kMul: da = g[i] * bv[ib]; db = g[i] * av[ia]; break;
                 case BinaryKind::kDiv:
                   da = g[i] / bv[ib];
                   db = -g[i] * av[ia] / (bv[ib] * bv[ib]);
                   break;
               }
               if (ga_on) ga[ia] += da;
               if (gb_on) gb[ib] += db;
             }
           });
  }
  return out;
}

// Pointwise op whose derivative is expressed through input x and output y.
template <typename T, typename Forward, typename Derivative>
Tensor<T> Unary(const Tensor<T>& a, Forward forward, Derivative derivative) {
  const auto av = a.data();
  std::vector<T> value(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) value[i] = forward(av[i]);
  Tensor<T> out(a.shape(), std::move(value));
  if (NeedsRecord({&a})) {
    auto* o = out.node().get();
    Attach(out, {a.node()},
           [an = a.node(), o, derivative](std::span<const T> g) {
             auto ga = an->GradBuffer();
             for (std::size_t i = 0; i < g.size(); ++i) {
               ga[i] += g[i] * derivative(an->value[i], o->value[i]);
             }
           });
  }
  return out;
}

}  // namespace

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b) {
  return Binary(a, b, BinaryKind::kAdd);
}
template <typename T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b) {
  return Binary(a, b, BinaryKind::kSub);
}
template <typename T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b) {
  return Binary(a, b, BinaryKind::kMul);
}
template <typename T>
Tensor<T> Div(const Tensor<T>& a, const Tensor<T>& b) {
  return Binary(a, b, BinaryKind::kDiv);
}

template <typename T>
Tensor<T> Neg(const Tensor<T>& a) {
  return Unary(a, [](T x) { return -x; }, [](T, T) { return T(-1); });
}

template <typename T>
Tensor<T> Exp(const Tensor<T>& a) {
  return Unary(a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> Log(const Tensor<T>& a) {
  for (T x : a.data()) {
    if (!(x > T(0))) {
      throw NumericError("log of non-positive value " + std::to_string(x) +
                         "; clamp before taking the log");
    }
  }
  return Unary(a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
Tensor<T> Abs(const Tensor<T>& a) {
  return Unary(
      a, [](T x) { return std::abs(x); },
      [](T x, T) { return x > T(0) ? T(1) : (x < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> Relu(const Tensor<T>& a) {
  return Unary(
      a, [](T x) { return x > T(0) ? x : T(0); },
      [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> LeakyRelu(const Tensor<T>& a, T slope) {
  return Unary(
      a, [slope](T x) { return x > T(0) ? x : slope * x; },
      [slope](T x, T) { return x > T(0) ? T(1) : slope; });
}

template <typename T>
Tensor<T> Gelu(const Tensor<T>& a) {
  constexpr T kInvSqrt2 = T(0.70710678118654752440);
  constexpr T kInvSqrt2Pi = T(0.39894228040143267794);
  return Unary(
      a, [](T x) { return T(0.5) * x * (T(1) + std::erf(x * kInvSqrt2)); },
      [](T x, T) {
        const T cdf = T(0.5) * (T(1) + std::erf(x * kInvSqrt2));
        return cdf + x * kInvSqrt2Pi * std::exp(T(-0.5) * x * x);
      });
}

template <typename T>
Tensor<T> MaxWithScalar(const Tensor<T>& a, T floor) {
  return Unary(
      a, [floor](T x) { return x > floor ? x : floor; },
      [floor](T x, T) { return x > floor ? T(1) : T(0); });
}

template <typename T>
Tensor<T> Scale(const Tensor<T>& a, T factor) {
  return Unary(a, [factor](T x) { return x * factor; },
               [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> AddScalar(const Tensor<T>& a, T offset) {
  return Unary(a, [offset](T x) { return x + offset; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b) {
  CheckDefined(a, "matmul");
  CheckDefined(b, "matmul");
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + ShapeToString(a.shape()) +
                         " by " + ShapeToString(b.shape()));
  }
  const auto m = static_cast<Eigen::Index>(a.dim(0));
  const auto k = static_cast<Eigen::Index>(a.dim(1));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  std::vector<T> value(static_cast<std::size_t>(m * n));
  MatrixMap<T>(value.data(), m, n).noalias() =
      ConstMatrixMap<T>(a.data().data(), m, k) *
      ConstMatrixMap<T>(b.data().data(), k, n);
  Tensor<T> out(Shape{a.dim(0), b.dim(1)}, std::move(value));
  if (NeedsRecord({&a, &b})) {
    Attach(out, {a.node(), b.node()},
           [an = a.node(), bn = b.node(), m, k, n](std::span<const T> g) {
             ConstMatrixMap<T> grad(g.data(), m, n);
             if (an->requires_grad) {
               MatrixMap<T>(an->GradBuffer().data(), m, k).noalias() +=
                   grad * ConstMatrixMap<T>(bn->value.data(), k, n).transpose();
             }
             if (bn->requires_grad) {
               MatrixMap<T>(bn->GradBuffer().data(), k, n).noalias() +=
                   ConstMatrixMap<T>(an->value.data(), m, k).transpose() * grad;
             }
           });
  }
  return out;
}

template <typename T>
Tensor<T> BiasAdd(const Tensor<T>& x, const Tensor<T>& bias) {
  CheckDefined(x, "bias_add");
  CheckDefined(bias, "bias_add");
  if (x.rank() == 0 || bias.rank() != 1 || bias.dim(0) != x.shape().back()) {
    throw DimensionError("bias_add: bias " + ShapeToString(bias.shape()) +
                         " does not match last axis of " +
                         ShapeToString(x.shape()));
  }
  const std::size_t width = bias.dim(0);
  const auto xv = x.data();
  const auto bv = bias.data();
  std::vector<T> value(xv.begin(), xv.end());
  for (std::size_t i = 0; i < value.size(); ++i) value[i] += bv[i % width];
  Tensor<T> out(x.shape(), std::move(value));
  if (NeedsRecord({&x, &bias})) {
    Attach(out, {x.node(), bias.node()},
           [xn = x.node(), bn = bias.node(), width](std::span<const T> g) {
             if (xn->requires_grad) {
               auto gx = xn->GradBuffer();
               for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
             }
             if (bn->requires_grad) {
               auto gb = bn->GradBuffer();
               for (std::size_t i = 0; i < g.size(); ++i) gb[i % width] += g[i];
             }
           });
  }
  return out;
}

template <typename T>
Tensor<T> Linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  return BiasAdd(MatMul(x, weight), bias);
}

template <typename T>
Tensor<T> Sum(const Tensor<T>& a) {
  CheckDefined(a, "sum");
  T total = 0;
  for (T x : a.data()) total += x;
  auto out = Tensor<T>::Scalar(total);
  if (NeedsRecord({&a})) {
    Attach(out, {a.node()}, [an = a.node()](std::span<const T> g) {
      for (auto& v : an->GradBuffer()) v += g[0];
    });
  }
  return out;
}

template <typename T>
Tensor<T> Sum(const Tensor<T>& a, std::size_t axis) {
  CheckDefined(a, "sum");
  CheckAxis(a.shape(), axis, "sum");
  const AxisSplit s = SplitAt(a.shape(), axis);
  Shape shape = a.shape();
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  std::vector<T> value(s.outer * s.inner, T(0));
  const auto av = a.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t j = 0; j < s.extent; ++j) {
      const T* src = av.data() + (o * s.extent + j) * s.inner;
      T* dst = value.data() + o * s.inner;
      for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
    }
  }
  Tensor<T> out(std::move(shape), std::move(value));
  if (NeedsRecord({&a})) {
    Attach(out, {a.node()}, [an = a.node(), s](std::span<const T> g) {
      auto ga = an->GradBuffer();
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t j = 0; j < s.extent; ++j) {
          T* dst = ga.data() + (o * s.extent + j) * s.inner;
          const T* src = g.data() + o * s.inner;
          for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Mean(const Tensor<T>& a) {
  CheckDefined(a, "mean");
  return Scale(Sum(a), T(1) / static_cast<T>(a.numel()));
}

template <typename T>
Tensor<T> Mean(const Tensor<T>& a, std::size_t axis) {
  CheckDefined(a, "mean");
  CheckAxis(a.shape(), axis, "mean");
  return Scale(Sum(a, axis), T(1) / static_cast<T>(a.dim(axis)));
}

template <typename T>
Tensor<T> Softmax(const Tensor<T>& a, std::size_t axis) {
  CheckDefined(a, "softmax");
  CheckAxis(a.shape(), axis, "softmax");
  const auto av = a.data();
  for (T x : av) {
    if (std::isnan(x)) throw NumericError("softmax: NaN input");
  }
  const AxisSplit s = SplitAt(a.shape(), axis);
  std::vector<T> value(av.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.extent * s.inner + i;
      T peak = av[base];
      for (std::size_t j = 1; j < s.extent; ++j) {
        peak = std::max(peak, av[base + j * s.inner]);
      }
      T total = 0;
      for (std::size_t j = 0; j < s.extent; ++j) {
        const T e = std::exp(av[base + j * s.inner] - peak);
        value[base + j * s.inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < s.extent; ++j) value[base + j * s.inner] /= total;
    }
  }
  Tensor<T> out(a.shape(), std::move(value));
  if (NeedsRecord({&a})) {
    auto* o = out.node().get();
    Attach(out, {a.node()}, [an = a.node(), o, s](std::span<const T> g) {
      auto ga = an->GradBuffer();
      const auto& y = o->value;
      for (std::size_t oo = 0; oo < s.outer; ++oo) {
        for (std::size_t i = 0; i < s.inner; ++i) {
          const std::size_t base = oo * s.extent * s.inner + i;
          T dot = 0;
          for (std::size_t j = 0; j < s.extent; ++j) {
            dot += g[base + j * s.inner] * y[base + j * s.inner];
          }
          for (std::size_t j = 0; j < s.extent; ++j) {
            const std::size_t idx = base + j * s.inner;
            ga[idx] += y[idx] * (g[idx] - dot);
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> LayerNorm(const Tensor<T>& a, const Tensor<T>& gain,
                    const Tensor<T>& shift, T eps) {
  CheckDefined(a, "layer_norm");
  if (eps <= T(0)) throw ConfigError("layer_norm: eps must be positive");
  if (a.rank() == 0) throw DimensionError("layer_norm: rank-0 input");
  const std::size_t d = a.shape().back();
  if (gain.shape() != Shape{d} || shift.shape() != Shape{d}) {
    throw DimensionError("layer_norm: gain " + ShapeToString(gain.shape()) +
                         " / shift " + ShapeToString(shift.shape()) +
                         " must be [" + std::to_string(d) + "]");
  }
  const std::size_t rows = a.numel() / d;
  const auto av = a.data();
  const auto gv = gain.data();
  const auto sv = shift.data();
  std::vector<T> normalized(av.size());
  std::vector<T> inv_std(rows);
  std::vector<T> value(av.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = av.data() + r * d;
    T mean = 0;
    for (std::size_t i = 0; i < d; ++i) mean += x[i];
    mean /= static_cast<T>(d);
    T var = 0;
    for (std::size_t i = 0; i < d; ++i) var += (x[i] - mean) * (x[i] - mean);
    var /= static_cast<T>(d);
    inv_std[r] = T(1) / std::sqrt(var + eps);
    for (std::size_t i = 0; i < d; ++i) {
      const T xhat = (x[i] - mean) * inv_std[r];
      normalized[r * d + i] = xhat;
      value[r * d + i] = xhat * gv[i] + sv[i];
    }
  }
  Tensor<T> out(a.shape(), std::move(value));
  if (NeedsRecord({&a, &gain, &shift})) {
    Attach(out, {a.node(), gain.node(), shift.node()},
           [an = a.node(), gn = gain.node(), sn = shift.node(),
            normalized = std::move(normalized), inv_std = std::move(inv_std), d,
            rows](std::span<const T> g) {
             const auto& gv = gn->value;
             if (gn->requires_grad) {
               auto gg = gn->GradBuffer();
               for (std::size_t k = 0; k < g.size(); ++k) gg[k % d] += g[k] * normalized[k];
             }
             if (sn->requires_grad) {
               auto gs = sn->GradBuffer();
               for (std::size_t k = 0; k < g.size(); ++k) gs[k % d] += g[k];
             }
             if (an->requires_grad) {
               auto ga = an->GradBuffer();
               const T inv_d = T(1) / static_cast<T>(d);
               for (std::size_t r = 0; r < rows; ++r) {
                 T sum_dxhat = 0;
                 T sum_dxhat_xhat = 0;
                 for (std::size_t i = 0; i < d; ++i) {
                   const T dxhat = g[r * d + i] * gv[i];
                   sum_dxhat += dxhat;
                   sum_dxhat_xhat += dxhat * normalized[r * d + i];
                 }
                 for (std::size_t i = 0; i < d; ++i) {
                   const T dxhat = g[r * d + i] * gv[i];
                   ga[r * d + i] += inv_std[r] * inv_d *
                                    (static_cast<T>(d) * dxhat - sum_dxhat -
                                     normalized[r * d + i] * sum_dxhat_xhat);
                 }
               }
             }
           });
  }
  return out;
}

template <typename T>
Tensor<T> Reshape(const Tensor<T>& a, Shape shape) {
  CheckDefined(a, "reshape");
  if (NumElements(shape) != a.numel()) {
    throw DimensionError("reshape: cannot view " + ShapeToString(a.shape()) +
                         " as " + ShapeToString(shape));
  }
  Tensor<T> out(std::move(shape), std::vector<T>(a.data().begin(), a.data().end()));
  if (NeedsRecord({&a})) {
    Attach(out, {a.node()}, [an = a.node()](std::span<const T> g) {
      auto ga = an->GradBuffer();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> Transpose(const Tensor<T>& a, std::size_t axis0, std::size_t axis1) {
  CheckDefined(a, "transpose");
  CheckAxis(a.shape(), axis0, "transpose");
  CheckAxis(a.shape(), axis1, "transpose");
  const Shape& in_shape = a.shape();
  const std::size_t rank = in_shape.size();
  std::vector<std::size_t> in_strides(rank, 1);
  for (std::size_t i = rank - 1; i > 0; --i) in_strides[i - 1] = in_strides[i] * in_shape[i];
  Shape out_shape = in_shape;
  std::swap(out_shape[axis0], out_shape[axis1]);
  std::vector<std::size_t> strides = in_strides;
  std::swap(strides[axis0], strides[axis1]);

  // source index for every output element, in output order
  const std::size_t n = a.numel();
  std::vector<std::size_t> source(n);
  std::vector<std::size_t> counter(rank, 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < n; ++i) {
    source[i] = offset;
    for (std::size_t ax = rank; ax-- > 0;) {
      if (++counter[ax] < out_shape[ax]) {
        offset += strides[ax];
        break;
      }
      offset -= strides[ax] * (out_shape[ax] - 1);
      counter[ax] = 0;
    }
  }
  const auto av = a.data();
  std::vector<T> value(n);
  for (std::size_t i = 0; i < n; ++i) value[i] = av[source[i]];
  Tensor<T> out(std::move(out_shape), std::move(value));
  if (NeedsRecord({&a})) {
    Attach(out, {a.node()},
           [an = a.node(), source = std::move(source)](std::span<const T> g) {
             auto ga = an->GradBuffer();
             for (std::size_t i = 0; i < g.size(); ++i) ga[source[i]] += g[i];
           });
  }
  return out;
}

template <typename T>
Tensor<T> Slice(const Tensor<T>& a, std::size_t axis, std::size_t start,
                std::size_t length) {
  CheckDefined(a, "slice");
  CheckAxis(a.shape(), axis, "slice");
  if (length == 0 || start + length > a.dim(axis)) {
    throw DimensionError("slice: [" + std::to_string(start) + ", " +
                         std::to_string(start + length) + ") out of range on axis " +
                         std::to_string(axis) + " of " + ShapeToString(a.shape()));
  }
  const AxisSplit s = SplitAt(a.shape(), axis);
  Shape shape = a.shape();
  shape[axis] = length;
  const std::size_t chunk = length * s.inner;
  std::vector<T> value(s.outer * chunk);
  const auto av = a.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    const T* src = av.data() + (o * s.extent + start) * s.inner;
    std::copy(src, src + chunk, value.data() + o * chunk);
  }
  Tensor<T> out(std::move(shape), std::move(value));
  if (NeedsRecord({&a})) {
    Attach(out, {a.node()}, [an = a.node(), s, start, chunk](std::span<const T> g) {
      auto ga = an->GradBuffer();
      for (std::size_t o = 0; o < s.outer; ++o) {
        T* dst = ga.data() + (o * s.extent + start) * s.inner;
        const T* src = g.data() + o * chunk;
        for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  for (const auto& p : parts) CheckDefined(p, "concat");
  const Shape& first = parts.front().shape();
  CheckAxis(first, axis, "concat");
  Shape shape = first;
  shape[axis] = 0;
  for (const auto& p : parts) {
    Shape probe = p.shape();
    if (probe.size() != first.size()) {
      throw DimensionError("concat: rank mismatch " + ShapeToString(first) +
                           " vs " + ShapeToString(probe));
    }
    probe[axis] = first[axis];
    if (probe != first) {
      throw DimensionError("concat: shapes " + ShapeToString(first) + " and " +
                           ShapeToString(p.shape()) + " differ off axis " +
                           std::to_string(axis));
    }
    shape[axis] += p.dim(axis);
  }
  const AxisSplit s = SplitAt(shape, axis);
  std::vector<T> value(NumElements(shape));
  std::vector<std::size_t> offsets;
  std::size_t running = 0;
  for (const auto& p : parts) {
    offsets.push_back(running);
    const std::size_t chunk = p.dim(axis) * s.inner;
    const auto pv = p.data();
    for (std::size_t o = 0; o < s.outer; ++o) {
      std::copy(pv.data() + o * chunk, pv.data() + (o + 1) * chunk,
                value.data() + (o * s.extent + running) * s.inner);
    }
    running += p.dim(axis);
  }
  Tensor<T> out(std::move(shape), std::move(value));
  bool record = false;
  for (const auto& p : parts) record = record || NeedsRecord({&p});
  if (record) {
    std::vector<NodePtr<T>> nodes;
    for (const auto& p : parts) nodes.push_back(p.node());
    Attach(out, nodes,
           [nodes, offsets = std::move(offsets), s, axis](std::span<const T> g) {
             for (std::size_t k = 0; k < nodes.size(); ++k) {
               auto& node = *nodes[k];
               if (!node.requires_grad) continue;
               const std::size_t chunk = node.shape[axis] * s.inner;
               auto gp = node.GradBuffer();
               for (std::size_t o = 0; o < s.outer; ++o) {
                 const T* src = g.data() + (o * s.extent + offsets[k]) * s.inner;
                 T* dst = gp.data() + o * chunk;
                 for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
               }
             }
           });
  }
  return out;
}

std::size_t Conv1dOutputLength(std::size_t length, std::size_t kernel,
                               std::size_t stride, std::size_t padding) {
  if (stride == 0) throw ConfigError("conv1d: stride must be >= 1");
  if (length + 2 * padding < kernel) return 0;
  return (length + 2 * padding - kernel) / stride + 1;
}

template <typename T>
Tensor<T> Conv1dGrouped(const Tensor<T>& input, const Tensor<T>& weight,
                        const Tensor<T>& bias, const Conv1dOptions& options) {
  CheckDefined(input, "conv1d");
  CheckDefined(weight, "conv1d");
  if (input.rank() != 2 && input.rank() != 3) {
    throw DimensionError("conv1d: input must be [C, T] or [B, C, T], got " +
                         ShapeToString(input.shape()));
  }
  if (weight.rank() != 3) {
    throw DimensionError("conv1d: weight must be [C_out, C_in/g, k], got " +
                         ShapeToString(weight.shape()));
  }
  const bool batched = input.rank() == 3;
  const std::size_t batch = batched ? input.dim(0) : 1;
  const std::size_t c_in = input.dim(batched ? 1 : 0);
  const std::size_t length = input.dim(batched ? 2 : 1);
  const std::size_t c_out = weight.dim(0);
  const std::size_t kernel = weight.dim(2);
  const std::size_t groups = options.groups;
  const std::size_t stride = options.stride;
  const std::size_t pad = options.padding;
  if (groups == 0 || c_in % groups != 0 || c_out % groups != 0) {
    throw ConfigError("conv1d: C_in=" + std::to_string(c_in) +
                      " and C_out=" + std::to_string(c_out) +
                      " must both be divisible by groups=" + std::to_string(groups));
  }
  if (stride == 0) throw ConfigError("conv1d: stride must be >= 1");
  const std::size_t cg_in = c_in / groups;
  const std::size_t cg_out = c_out / groups;
  if (weight.dim(1) != cg_in) {
    throw DimensionError("conv1d: weight " + ShapeToString(weight.shape()) +
                         " expects " + std::to_string(weight.dim(1)) +
                         " input channels per group, input gives " +
                         std::to_string(cg_in));
  }
  if (bias.defined() && bias.shape() != Shape{c_out}) {
    throw DimensionError("conv1d: bias " + ShapeToString(bias.shape()) +
                         " must be [" + std::to_string(c_out) + "]");
  }
  const std::size_t t_out = Conv1dOutputLength(length, kernel, stride, pad);
  if (t_out == 0) {
    throw DimensionError("conv1d: input length " + std::to_string(length) +
                         " too short for kernel " + std::to_string(kernel));
  }

  const auto rows = static_cast<Eigen::Index>(cg_in * kernel);
  const auto cols = static_cast<Eigen::Index>(t_out);
  // im2col for one (batch, group) pair.
  auto gather = [=](const T* x, std::size_t b, std::size_t g, T* col) {
    for (std::size_t c = 0; c < cg_in; ++c) {
      const T* row = x + (b * c_in + g * cg_in + c) * length;
      for (std::size_t j = 0; j < kernel; ++j) {
        T* dst = col + (c * kernel + j) * t_out;
        for (std::size_t t = 0; t < t_out; ++t) {
          const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t * stride + j) -
                                     static_cast<std::ptrdiff_t>(pad);
          dst[t] = (pos >= 0 && pos < static_cast<std::ptrdiff_t>(length)) ? row[pos] : T(0);
        }
      }
    }
  };

  const auto xv = input.data();
  const auto wv = weight.data();
  std::vector<T> value(batch * c_out * t_out);
  std::vector<T> col(static_cast<std::size_t>(rows * cols));
  ConstMatrixMap<T> w_all(wv.data(), static_cast<Eigen::Index>(c_out), rows);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t g = 0; g < groups; ++g) {
      gather(xv.data(), b, g, col.data());
      MatrixMap<T> out_g(value.data() + (b * c_out + g * cg_out) * t_out,
                         static_cast<Eigen::Index>(cg_out), cols);
      out_g.noalias() = w_all.middleRows(static_cast<Eigen::Index>(g * cg_out),
                                         static_cast<Eigen::Index>(cg_out)) *
                        ConstMatrixMap<T>(col.data(), rows, cols);
    }
    if (bias.defined()) {
      const auto bv = bias.data();
      for (std::size_t c = 0; c < c_out; ++c) {
        T* row = value.data() + (b * c_out + c) * t_out;
        for (std::size_t t = 0; t < t_out; ++t) row[t] += bv[c];
      }
    }
  }
  Shape shape = batched ? Shape{batch, c_out, t_out} : Shape{c_out, t_out};
  Tensor<T> out(std::move(shape), std::move(value));
  if (NeedsRecord({&input, &weight, &bias})) {
    std::vector<NodePtr<T>> parents{input.node(), weight.node()};
    NodePtr<T> bn = bias.defined() ? bias.node() : nullptr;
    if (bn) parents.push_back(bn);
    Attach(out, parents,
           [xn = input.node(), wn = weight.node(), bn, gather, batch, groups,
            c_in, c_out, cg_in, cg_out, kernel, stride, pad, length, t_out, rows,
            cols](std::span<const T> g) {
             std::vector<T> col(static_cast<std::size_t>(rows * cols));
             std::vector<T> dcol(col.size());
             ConstMatrixMap<T> w_all(wn->value.data(), static_cast<Eigen::Index>(c_out), rows);
             for (std::size_t b = 0; b < batch; ++b) {
               for (std::size_t grp = 0; grp < groups; ++grp) {
                 ConstMatrixMap<T> dout(g.data() + (b * c_out + grp * cg_out) * t_out,
                                        static_cast<Eigen::Index>(cg_out), cols);
                 if (wn->requires_grad) {
                   gather(xn->value.data(), b, grp, col.data());
                   MatrixMap<T>(wn->GradBuffer().data(), static_cast<Eigen::Index>(c_out), rows)
                       .middleRows(static_cast<Eigen::Index>(grp * cg_out),
                                   static_cast<Eigen::Index>(cg_out))
                       .noalias() += dout * ConstMatrixMap<T>(col.data(), rows, cols).transpose();
                 }
                 if (xn->requires_grad) {
                   MatrixMap<T>(dcol.data(), rows, cols).noalias() =
                       w_all.middleRows(static_cast<Eigen::Index>(grp * cg_out),
                                        static_cast<Eigen::Index>(cg_out))
                           .transpose() *
                       dout;
                   auto gx = xn->GradBuffer();
                   for (std::size_t c = 0; c < cg_in; ++c) {
                     T* row = gx.data() + (b * c_in + grp * cg_in + c) * length;
                     for (std::size_t j = 0; j < kernel; ++j) {
                       const T* src = dcol.data() + (c * kernel + j) * t_out;
                       for (std::size_t t = 0; t < t_out; ++t) {
                         const std::ptrdiff_t pos =
                             static_cast<std::ptrdiff_t>(t * stride + j) -
                             static_cast<std::ptrdiff_t>(pad);
                         if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(length)) {
                           row[pos] += src[t];
                         }
                       }
                     }
                   }
                 }
               }
               if (bn && bn->requires_grad) {
                 auto gb = bn->GradBuffer();
                 for (std::size_t c = 0; c < c_out; ++c) {
                   const T* row = g.data() + (b * c_out + c) * t_out;
                   for (std::size_t t = 0; t < t_out; ++t) gb[c] += row[t];
                 }
               }
             }
           });
  }
  return out;
}

#define NUGAN_INSTANTIATE_OPS(T)                                                   \
  template Tensor<T> Add(const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> Sub(const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> Mul(const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> Div(const Tensor<T>&, const Tensor<T>&);                     \
  template Tensor<T> Neg(const Tensor<T>&);                                       \
  template Tensor<T> Exp(const Tensor<T>&);                                       \
  template Tensor<T> Log(const Tensor<T>&);                                       \
  template Tensor<T> Abs(const Tensor<T>&);                                       \
  template Tensor<T> Relu(const Tensor<T>&);                                      \
  template Tensor<T> LeakyRelu(const Tensor<T>&, T);                              \
  template Tensor<T> Gelu(const Tensor<T>&);                                      \
  template Tensor<T> MaxWithScalar(const Tensor<T>&, T);                          \
  template Tensor<T> Scale(const Tensor<T>&, T);                                  \
  template Tensor<T> AddScalar(const Tensor<T>&, T);                              \
  template Tensor<T> MatMul(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> BiasAdd(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> Linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&); \
  template Tensor<T> Sum(const Tensor<T>&);                                       \
  template Tensor<T> Sum(const Tensor<T>&, std::size_t);                          \
  template Tensor<T> Mean(const Tensor<T>&);                                      \
  template Tensor<T> Mean(const Tensor<T>&, std::size_t);                         \
  template Tensor<T> Softmax(const Tensor<T>&, std::size_t);                      \
  template Tensor<T> LayerNorm(const Tensor<T>&, const Tensor<T>&,                \
                               const Tensor<T>&, T);                              \
  template Tensor<T> Reshape(const Tensor<T>&, Shape);                            \
  template Tensor<T> Transpose(const Tensor<T>&, std::size_t, std::size_t);       \
  template Tensor<T> Slice(const Tensor<T>&, std::size_t, std::size_t, std::size_t); \
  template Tensor<T> Concat(const std::vector<Tensor<T>>&, std::size_t);          \
  template Tensor<T> Conv1dGrouped(const Tensor<T>&, const Tensor<T>&,            \
                                   const Tensor<T>&, const Conv1dOptions&);

NUGAN_INSTANTIATE_OPS(float)
NUGAN_INSTANTIATE_OPS(double)

#undef NUGAN_INSTANTIATE_OPS

}  // namespace nugan
