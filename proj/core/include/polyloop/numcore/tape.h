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

#ifndef POLYLOOP_NUMCORE_TAPE_H_
#define POLYLOOP_NUMCORE_TAPE_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "polyloop/numcore/parameters.h"
#include "polyloop/numcore/tensor.h"

namespace polyloop::num {

template <typename T>
class Tape;

// Handle to a value recorded on a tape.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape<T>* tape() const { return tape_; }
  std::size_t index() const { return index_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor<T>& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  Tape<T>* tape_ = nullptr;
  std::size_t index_ = 0;
};

// Records primitive results in creation order, which is a topological
// order of the computation. Backward() walks the nodes in reverse and adds
// each reachable parameter's gradient into Parameter::grad; callers zero
// the accumulators (ParameterStore::ZeroGrad) before a backward pass.
//
// With recording disabled the tape only holds values, so forward passes
// used for inference or state warm-up cost no gradient bookkeeping.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  std::size_t size() const { return nodes_.size(); }

  Var<T> Constant(Tensor<T> value);
  // Leaf bound to a parameter. Repeated calls return the same node.
  Var<T> Param(Parameter<T>& param);

  // Used by primitives. `backward` is kept only when recording and at
  // least one input needs a gradient.
  Var<T> Push(Tensor<T> value, std::initializer_list<Var<T>> inputs,
              BackwardFn backward);
  Var<T> Push(Tensor<T> value, const std::vector<Var<T>>& inputs,
              BackwardFn backward);

  const Tensor<T>& Value(std::size_t index) const {
    return nodes_[index].value;
  }
  bool NeedsGrad(std::size_t index) const {
    return nodes_[index].needs_grad;
  }
  // Gradient of the final loss w.r.t. node `index`; allocated on demand.
  Tensor<T>& Grad(std::size_t index);

  // Seeds d(loss)/d(loss) = 1 and propagates. `loss` must hold exactly one
  // value.
  void Backward(Var<T> loss);

 private:
  struct Node {
    Tensor<T> value;
    std::optional<Tensor<T>> grad;
    BackwardFn backward;
    Parameter<T>* param = nullptr;
    bool needs_grad = false;
  };

  bool recording_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter<T>*, std::size_t> param_nodes_;
};

template <typename T>
const Tensor<T>& Var<T>::value() const {
  return tape_->Value(index_);
}

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace polyloop::num

#endif  // POLYLOOP_NUMCORE_TAPE_H_
