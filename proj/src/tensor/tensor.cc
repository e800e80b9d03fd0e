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

#include "nugan/tensor.h"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <utility>

#include "nugan/errors.h"

namespace nugan {
namespace {

thread_local bool grad_enabled = true;
std::atomic<double> backward_seed_scale{1.0};

}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ']';
  return out.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data, bool requires_grad) {
  for (auto d : shape) {
    if (d == 0) {
      throw DimensionError("tensor dimensions must be positive, got " +
                           ShapeToString(shape));
    }
  }
  if (NumElements(shape) != data.size()) {
    throw DimensionError("shape " + ShapeToString(shape) + " needs " +
                         std::to_string(NumElements(shape)) +
                         " elements, got " + std::to_string(data.size()));
  }
  node_ = std::make_shared<internal::Node<T>>();
  node_->shape = std::move(shape);
  node_->value = std::move(data);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::Full(Shape shape, T value, bool requires_grad) {
  const std::size_t n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::Scalar(T value, bool requires_grad) {
  return Tensor(Shape{}, std::vector<T>{value}, requires_grad);
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + ShapeToString(shape()));
  }
  return node_->shape[axis];
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) {
    throw DimensionError("item() needs a single element, shape is " +
                         ShapeToString(shape()));
  }
  return node_->value[0];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(node_->shape, node_->value, false);
}

template <typename T>
Tape<T>& Tape<T>::Current() {
  thread_local Tape tape;
  return tape;
}

template <typename T>
void Tape<T>::Record(std::shared_ptr<internal::Node<T>> node) {
  entries_.push_back(std::move(node));
}

template <typename T>
void Tape<T>::Backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw DimensionError("backward needs a scalar loss, got shape " +
                         (loss.defined() ? ShapeToString(loss.shape())
                                         : std::string("<undefined>")));
  }
  const auto it = std::find(entries_.rbegin(), entries_.rend(), loss.node());
  if (it == entries_.rend()) {
    throw std::logic_error(
        "loss is not on the tape: it was built without gradient recording or "
        "backward already ran for it");
  }
  loss.node()->GradBuffer()[0] += static_cast<T>(backward_seed_scale.load());
  for (auto cur = it; cur != entries_.rend(); ++cur) {
    auto& node = **cur;
    if (node.grad.empty() || !node.backward) continue;
    node.backward(node.grad);
  }
  // Drop closures so captured activations are released and the graph cannot
  // be replayed.
  for (auto& node : entries_) {
    node->backward = nullptr;
    node->parents.clear();
  }
  entries_.clear();
}

bool GradEnabled() { return grad_enabled; }

void SetBackwardSeedScaleForTesting(double scale) { backward_seed_scale = scale; }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;

}  // namespace nugan
