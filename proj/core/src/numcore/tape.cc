// Copyright 2026 The polyloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polyloop/numcore/tape.h"

#include <utility>

namespace polyloop::num {

template <typename T>
Var<T> Tape<T>::Constant(Tensor<T> value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::Param(Parameter<T>& param) {
  auto it = param_nodes_.find(&param);
  if (it != param_nodes_.end()) return Var<T>(this, it->second);
  Node node;
  node.value = param.value;
  node.param = &param;
  node.needs_grad = recording_;
  nodes_.push_back(std::move(node));
  param_nodes_[&param] = nodes_.size() - 1;
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::Push(Tensor<T> value, std::initializer_list<Var<T>> inputs,
                     BackwardFn backward) {
  return Push(std::move(value), std::vector<Var<T>>(inputs),
              std::move(backward));
}

template <typename T>
Var<T> Tape<T>::Push(Tensor<T> value, const std::vector<Var<T>>& inputs,
                     BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  if (recording_) {
    for (const Var<T>& in : inputs) {
      if (in.tape() != this) {
        throw ValidationError("primitive input belongs to another tape");
      }
      if (nodes_[in.index()].needs_grad) node.needs_grad = true;
    }
    if (node.needs_grad) node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Tensor<T>& Tape<T>::Grad(std::size_t index) {
  Node& node = nodes_[index];
  if (!node.grad) node.grad.emplace(node.value.shape());
  return *node.grad;
}

template <typename T>
void Tape<T>::Backward(Var<T> loss) {
  if (loss.tape() != this) {
    throw ValidationError("backward: loss was not recorded on this tape");
  }
  if (Value(loss.index()).size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     ShapeToString(Value(loss.index()).shape()));
  }
  for (Node& n : nodes_) n.grad.reset();
  if (!nodes_[loss.index()].needs_grad) return;
  Grad(loss.index())[0] = T(1);
  for (std::size_t i = loss.index() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.grad) continue;
    if (node.backward) node.backward(*this, i);
    if (node.param) {
      auto dst = node.param->grad.values();
      auto src = node.grad->values();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace polyloop::num
