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

// Reverse-mode automatic differentiation over dense row-major arrays.
//
// A Tensor is a cheap handle to a shared node. Operations executed while
// gradient recording is enabled, and with at least one input that requires a
// gradient, append their output node to the calling thread's Tape. Backward()
// walks the tape in reverse from the loss, accumulating gradients additively,
// and clears it.

#ifndef NUGAN_TENSOR_H_
#define NUGAN_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nugan {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

namespace internal {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  // Empty until the first accumulation.
  std::vector<T> grad;
  bool requires_grad = false;
  // Set for op outputs recorded on a tape. Receives this node's gradient.
  std::function<void(std::span<const T>)> backward;
  std::vector<std::shared_ptr<Node>> parents;

  std::span<T> GradBuffer() {
    if (grad.empty()) grad.assign(value.size(), T(0));
    return grad;
  }
};

}  // namespace internal

template <typename T>
class Tensor {
 public:
  using value_type = T;
  using NodePtr = std::shared_ptr<internal::Node<T>>;

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, T value, bool requires_grad = false);
  static Tensor Scalar(T value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return node_->value.size(); }

  std::span<const T> data() const { return node_->value; }
  // In-place writes are reserved for optimizers and initializers; tensors
  // already consumed by recorded ops must not be mutated before Backward().
  std::span<T> mutable_data() { return node_->value; }
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool value) { node_->requires_grad = value; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->GradBuffer(); }
  void zero_grad() { node_->grad.clear(); }

  // New leaf holding a copy of the values, without gradient history.
  Tensor detach() const;

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

// Ordered record of executed ops for one thread (one execution lane).
template <typename T>
class Tape {
 public:
  static Tape& Current();

  void Record(std::shared_ptr<internal::Node<T>> node);
  std::size_t size() const { return entries_.size(); }
  void Clear() { entries_.clear(); }

  // Accumulates d(loss)/d(x) into every requires_grad ancestor of `loss`,
  // then clears the tape. Throws if `loss` is not a scalar or is not on the
  // tape (e.g. a second call without re-running the forward pass).
  void Backward(const Tensor<T>& loss);

 private:
  std::vector<std::shared_ptr<internal::Node<T>>> entries_;
};

template <typename T>
void Backward(const Tensor<T>& loss) {
  Tape<T>::Current().Backward(loss);
}

bool GradEnabled();

// Negative-control hook: scales the seed gradient of every backward pass so
// gradient checks can be shown to fail. Default 1.
void SetBackwardSeedScaleForTesting(double scale);

// Disables recording on the current thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

template <typename T>
using ParameterList = std::vector<NamedTensor<T>>;

template <typename T>
void ZeroGrads(ParameterList<T>& params) {
  for (auto& p : params) p.tensor.zero_grad();
}

template <typename T>
void SetRequiresGrad(ParameterList<T>& params, bool value) {
  for (auto& p : params) p.tensor.set_requires_grad(value);
}

}  // namespace nugan

#endif  // NUGAN_TENSOR_H_
