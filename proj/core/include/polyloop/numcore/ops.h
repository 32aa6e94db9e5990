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

#ifndef POLYLOOP_NUMCORE_OPS_H_
#define POLYLOOP_NUMCORE_OPS_H_

#include <span>
#include <string_view>
#include <vector>

#include "polyloop/numcore/tape.h"

// Differentiable primitives. Every primitive works on rank-2 tensors
// (scalars are 1x1) except the conv1d weight, which is [kernel x in x out].
// Shape violations raise ShapeError naming the primitive and the operands.
namespace polyloop::num {

enum class Primitive {
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kTanh,
  kSigmoid,
  kExp,
  kLog,
  kAbs,
  kSoftplus,
  kSoftmax,
  kSum,
  kMean,
  kSumRows,
  kConcatCols,
  kConcatRows,
};

std::string_view PrimitiveName(Primitive p);

// Dispatches a parameter-free primitive over its inputs. Primitives with
// extra arguments (slice, conv1d, reshape, gather, scale) have their own
// entry points below.
template <typename T>
Var<T> Apply(Primitive p, std::span<const Var<T>> inputs);

template <typename T>
Var<T> MatMul(Var<T> a, Var<T> b);

// Elementwise with broadcasting: each dimension must match or be 1.
template <typename T>
Var<T> Add(Var<T> a, Var<T> b);
template <typename T>
Var<T> Sub(Var<T> a, Var<T> b);
template <typename T>
Var<T> Mul(Var<T> a, Var<T> b);

template <typename T>
Var<T> Scale(Var<T> a, T factor);
template <typename T>
Var<T> AddScalar(Var<T> a, T offset);

template <typename T>
Var<T> Tanh(Var<T> a);
template <typename T>
Var<T> Sigmoid(Var<T> a);
template <typename T>
Var<T> Exp(Var<T> a);
template <typename T>
Var<T> Log(Var<T> a);
template <typename T>
Var<T> Abs(Var<T> a);
// log(1 + exp(x)), evaluated without overflow.
template <typename T>
Var<T> Softplus(Var<T> a);
template <typename T>
Var<T> Square(Var<T> a);

// Row-wise softmax.
template <typename T>
Var<T> Softmax(Var<T> a);

// Reductions to 1x1.
template <typename T>
Var<T> Sum(Var<T> a);
template <typename T>
Var<T> Mean(Var<T> a);
// Column sums, [r x c] -> [1 x c].
template <typename T>
Var<T> SumRows(Var<T> a);

template <typename T>
Var<T> ConcatCols(const std::vector<Var<T>>& parts);
template <typename T>
Var<T> ConcatRows(const std::vector<Var<T>>& parts);

// Half-open ranges along one axis.
template <typename T>
Var<T> SliceRows(Var<T> a, std::size_t begin, std::size_t end);
template <typename T>
Var<T> SliceCols(Var<T> a, std::size_t begin, std::size_t end);

template <typename T>
Var<T> Reshape(Var<T> a, std::size_t rows, std::size_t cols);

// Rows of `table` selected by `indices`.
template <typename T>
Var<T> GatherRows(Var<T> table, std::span<const int> indices);

// input [length x in], weight [kernel x in x out], bias [1 x out], stride 1.
// Output length is length + 2 * padding - kernel + 1.
template <typename T>
Var<T> Conv1d(Var<T> input, Var<T> weight, Var<T> bias, std::size_t padding);

}  // namespace polyloop::num

#endif  // POLYLOOP_NUMCORE_OPS_H_
