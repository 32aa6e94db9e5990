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

#ifndef POLYLOOP_NUMCORE_TENSOR_H_
#define POLYLOOP_NUMCORE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "polyloop/common/error.h"

namespace polyloop::num {

using Shape = std::vector<std::size_t>;

std::string ShapeToString(const Shape& shape);
std::size_t ShapeProduct(const Shape& shape);

// Dense row-major tensor. The shape is fixed at construction; only the
// element values may change afterwards.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  // A 1x1 zero.
  Tensor() : shape_{1, 1}, data_(1, T(0)) {}

  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> data);

  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::initializer_list<T> values);
  static Tensor Scalar(T value) { return Tensor({1, 1}, {value}); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

  // Matrix accessors; valid for rank-2 tensors.
  std::size_t rows() const { return shape_[0]; }
  std::size_t cols() const { return shape_[1]; }
  T& operator()(std::size_t r, std::size_t c) {
    return data_[r * shape_[1] + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T item() const;
  void Fill(T value);

  template <typename U>
  Tensor<U> Cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace polyloop::num

#endif  // POLYLOOP_NUMCORE_TENSOR_H_
