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

#include "polyloop/numcore/ops.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace polyloop::num {

std::string_view PrimitiveName(Primitive p) {
  switch (p) {
    case Primitive::kMatMul: return "matmul";
    case Primitive::kAdd: return "add";
    case Primitive::kSub: return "sub";
    case Primitive::kMul: return "mul";
    case Primitive::kTanh: return "tanh";
    case Primitive::kSigmoid: return "sigmoid";
    case Primitive::kExp: return "exp";
    case Primitive::kLog: return "log";
    case Primitive::kAbs: return "abs";
    case Primitive::kSoftplus: return "softplus";
    case Primitive::kSoftmax: return "softmax";
    case Primitive::kSum: return "sum";
    case Primitive::kMean: return "mean";
    case Primitive::kSumRows: return "sum_rows";
    case Primitive::kConcatCols: return "concat_cols";
    case Primitive::kConcatRows: return "concat_rows";
  }
  return "unknown";
}

namespace {

[[noreturn]] void Fail(std::string_view op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": " + detail);
}

template <typename T>
void RequireMatrix(std::string_view op, const Var<T>& a) {
  if (!a.valid()) Fail(op, "invalid operand");
  if (a.value().rank() != 2) {
    Fail(op, "expected a matrix, got shape " + ShapeToString(a.shape()));
  }
}

template <typename T>
Tape<T>& SameTape(std::string_view op, const Var<T>& a, const Var<T>& b) {
  if (a.tape() != b.tape()) Fail(op, "operands recorded on different tapes");
  return *a.tape();
}

template <typename T>
void AddInto(Tensor<T>& dst, const Tensor<T>& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

// ---------------------------------------------------------------------------
// Unary elementwise.

// `fwd(x)` gives y; `deriv(x, y)` gives dy/dx.
template <typename T, typename Fwd, typename Deriv>
Var<T> Unary(std::string_view op, Var<T> a, Fwd fwd, Deriv deriv) {
  RequireMatrix(op, a);
  const Tensor<T>& x = a.value();
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = fwd(x[i]);
  const std::size_t ia = a.index();
  return a.tape()->Push(std::move(y), {a}, [ia, deriv](Tape<T>& t,
                                                      std::size_t self) {
    if (!t.NeedsGrad(ia)) return;
    const Tensor<T>& x = t.Value(ia);
    const Tensor<T>& y = t.Value(self);
    const Tensor<T>& gy = t.Grad(self);
    Tensor<T>& gx = t.Grad(ia);
    for (std::size_t i = 0; i < x.size(); ++i) {
      gx[i] += gy[i] * deriv(x[i], y[i]);
    }
  });
}

// ---------------------------------------------------------------------------
// Broadcasting binary elementwise.

struct Broadcast {
  std::size_t rows, cols;
};

template <typename T>
Broadcast BroadcastShape(std::string_view op, const Tensor<T>& a,
                         const Tensor<T>& b) {
  auto dim = [&](std::size_t da, std::size_t db, const char* axis) {
    if (da == db || db == 1) return da;
    if (da == 1) return db;
    Fail(op, std::string("cannot broadcast ") + ShapeToString(a.shape()) +
                 " with " + ShapeToString(b.shape()) + " along " + axis);
  };
  return {dim(a.rows(), b.rows(), "rows"), dim(a.cols(), b.cols(), "cols")};
}

enum class BinaryKind { kAdd, kSub, kMul };

template <typename T>
Var<T> Binary(std::string_view op, BinaryKind kind, Var<T> a, Var<T> b) {
  RequireMatrix(op, a);
  RequireMatrix(op, b);
  Tape<T>& tape = SameTape(op, a, b);
  const Tensor<T>& x = a.value();
  const Tensor<T>& z = b.value();
  const Broadcast bc = BroadcastShape(op, x, z);
  Tensor<T> y({bc.rows, bc.cols});
  const bool ar = x.rows() == 1, ac = x.cols() == 1;
  const bool br = z.rows() == 1, bcl = z.cols() == 1;
  for (std::size_t r = 0; r < bc.rows; ++r) {
    for (std::size_t c = 0; c < bc.cols; ++c) {
      const T u = x(ar ? 0 : r, ac ? 0 : c);
      const T v = z(br ? 0 : r, bcl ? 0 : c);
      switch (kind) {
        case BinaryKind::kAdd: y(r, c) = u + v; break;
        case BinaryKind::kSub: y(r, c) = u - v; break;
        case BinaryKind::kMul: y(r, c) = u * v; break;
      }
    }
  }
  const std::size_t ia = a.index(), ib = b.index();
  return tape.Push(std::move(y), {a, b}, [ia, ib, kind](Tape<T>& t,
                                                        std::size_t self) {
    const Tensor<T>& gy = t.Grad(self);
    const Tensor<T>& x = t.Value(ia);
    const Tensor<T>& z = t.Value(ib);
    const bool ar = x.rows() == 1, ac = x.cols() == 1;
    const bool br = z.rows() == 1, bcl = z.cols() == 1;
    const bool need_a = t.NeedsGrad(ia), need_b = t.NeedsGrad(ib);
    Tensor<T>* ga = need_a ? &t.Grad(ia) : nullptr;
    Tensor<T>* gb = need_b ? &t.Grad(ib) : nullptr;
    for (std::size_t r = 0; r < gy.rows(); ++r) {
      for (std::size_t c = 0; c < gy.cols(); ++c) {
        const T g = gy(r, c);
        const std::size_t xr = ar ? 0 : r, xc = ac ? 0 : c;
        const std::size_t zr = br ? 0 : r, zc = bcl ? 0 : c;
        switch (kind) {
          case BinaryKind::kAdd:
            if (ga) (*ga)(xr, xc) += g;
            if (gb) (*gb)(zr, zc) += g;
            break;
          case BinaryKind::kSub:
            if (ga) (*ga)(xr, xc) += g;
            if (gb) (*gb)(zr, zc) -= g;
            break;
          case BinaryKind::kMul:
            if (ga) (*ga)(xr, xc) += g * z(zr, zc);
            if (gb) (*gb)(zr, zc) += g * x(xr, xc);
            break;
        }
      }
    }
  });
}

template <typename T>
Var<T> Concat(std::string_view op, const std::vector<Var<T>>& parts,
              bool along_cols) {
  if (parts.empty()) Fail(op, "no operands");
  Tape<T>& tape = *parts.front().tape();
  std::size_t fixed = 0, total = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    RequireMatrix(op, parts[i]);
    if (parts[i].tape() != &tape) Fail(op, "operands on different tapes");
    const Tensor<T>& v = parts[i].value();
    const std::size_t keep = along_cols ? v.rows() : v.cols();
    const std::size_t grow = along_cols ? v.cols() : v.rows();
    if (i == 0) fixed = keep;
    if (keep != fixed) {
      Fail(op, "operand " + std::to_string(i) + " has shape " +
                   ShapeToString(v.shape()) + ", expected " +
                   std::to_string(fixed) + (along_cols ? " rows" : " cols"));
    }
    total += grow;
  }
  Tensor<T> y(along_cols ? Shape{fixed, total} : Shape{total, fixed});
  std::size_t offset = 0;
  for (const Var<T>& p : parts) {
    const Tensor<T>& v = p.value();
    for (std::size_t r = 0; r < v.rows(); ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) {
        if (along_cols) {
          y(r, offset + c) = v(r, c);
        } else {
          y(offset + r, c) = v(r, c);
        }
      }
    }
    offset += along_cols ? v.cols() : v.rows();
  }
  std::vector<std::size_t> ids;
  ids.reserve(parts.size());
  for (const Var<T>& p : parts) ids.push_back(p.index());
  return tape.Push(std::move(y), parts, [ids, along_cols](Tape<T>& t,
                                                          std::size_t self) {
    const Tensor<T>& gy = t.Grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const Tensor<T>& v = t.Value(id);
      if (t.NeedsGrad(id)) {
        Tensor<T>& g = t.Grad(id);
        for (std::size_t r = 0; r < v.rows(); ++r) {
          for (std::size_t c = 0; c < v.cols(); ++c) {
            g(r, c) += along_cols ? gy(r, offset + c) : gy(offset + r, c);
          }
        }
      }
      offset += along_cols ? v.cols() : v.rows();
    }
  });
}

template <typename T>
Var<T> Slice(std::string_view op, Var<T> a, std::size_t begin,
             std::size_t end, bool along_cols) {
  RequireMatrix(op, a);
  const Tensor<T>& x = a.value();
  const std::size_t extent = along_cols ? x.cols() : x.rows();
  if (begin >= end || end > extent) {
    Fail(op, "range [" + std::to_string(begin) + ", " + std::to_string(end) +
                 ") invalid for shape " + ShapeToString(x.shape()));
  }
  const std::size_t n = end - begin;
  Tensor<T> y(along_cols ? Shape{x.rows(), n} : Shape{n, x.cols()});
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t c = 0; c < y.cols(); ++c) {
      y(r, c) = along_cols ? x(r, begin + c) : x(begin + r, c);
    }
  }
  const std::size_t ia = a.index();
  return a.tape()->Push(std::move(y), {a}, [ia, begin, along_cols](
                                               Tape<T>& t, std::size_t self) {
    if (!t.NeedsGrad(ia)) return;
    const Tensor<T>& gy = t.Grad(self);
    Tensor<T>& gx = t.Grad(ia);
    for (std::size_t r = 0; r < gy.rows(); ++r) {
      for (std::size_t c = 0; c < gy.cols(); ++c) {
        if (along_cols) {
          gx(r, begin + c) += gy(r, c);
        } else {
          gx(begin + r, c) += gy(r, c);
        }
      }
    }
  });
}

}  // namespace

// ---------------------------------------------------------------------------

template <typename T>
Var<T> MatMul(Var<T> a, Var<T> b) {
  constexpr std::string_view op = "matmul";
  RequireMatrix(op, a);
  RequireMatrix(op, b);
  Tape<T>& tape = SameTape(op, a, b);
  const Tensor<T>& x = a.value();
  const Tensor<T>& w = b.value();
  if (x.cols() != w.rows()) {
    Fail(op, "inner dimensions differ: " + ShapeToString(x.shape()) + " * " +
                 ShapeToString(w.shape()));
  }
  const std::size_t m = x.rows(), k = x.cols(), n = w.cols();
  Tensor<T> y({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    T* yrow = &y(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const T xv = x(i, p);
      const T* wrow = &w(p, 0);
      for (std::size_t j = 0; j < n; ++j) yrow[j] += xv * wrow[j];
    }
  }
  const std::size_t ia = a.index(), ib = b.index();
  return tape.Push(std::move(y), {a, b}, [ia, ib](Tape<T>& t,
                                                  std::size_t self) {
    const Tensor<T>& gy = t.Grad(self);
    const Tensor<T>& x = t.Value(ia);
    const Tensor<T>& w = t.Value(ib);
    const std::size_t m = x.rows(), k = x.cols(), n = w.cols();
    if (t.NeedsGrad(ia)) {
      Tensor<T>& gx = t.Grad(ia);
      for (std::size_t i = 0; i < m; ++i) {
        const T* grow = &gy(i, 0);
        for (std::size_t p = 0; p < k; ++p) {
          const T* wrow = &w(p, 0);
          T acc = 0;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * wrow[j];
          gx(i, p) += acc;
        }
      }
    }
    if (t.NeedsGrad(ib)) {
      Tensor<T>& gw = t.Grad(ib);
      for (std::size_t i = 0; i < m; ++i) {
        const T* grow = &gy(i, 0);
        for (std::size_t p = 0; p < k; ++p) {
          const T xv = x(i, p);
          T* gwrow = &gw(p, 0);
          for (std::size_t j = 0; j < n; ++j) gwrow[j] += xv * grow[j];
        }
      }
    }
  });
}

template <typename T>
Var<T> Add(Var<T> a, Var<T> b) {
  return Binary("add", BinaryKind::kAdd, a, b);
}
template <typename T>
Var<T> Sub(Var<T> a, Var<T> b) {
  return Binary("sub", BinaryKind::kSub, a, b);
}
template <typename T>
Var<T> Mul(Var<T> a, Var<T> b) {
  return Binary("mul", BinaryKind::kMul, a, b);
}

template <typename T>
Var<T> Scale(Var<T> a, T factor) {
  return Unary<T>(
      "scale", a, [factor](T x) { return x * factor; },
      [factor](T, T) { return factor; });
}

template <typename T>
Var<T> AddScalar(Var<T> a, T offset) {
  return Unary<T>(
      "add_scalar", a, [offset](T x) { return x + offset; },
      [](T, T) { return T(1); });
}

template <typename T>
Var<T> Tanh(Var<T> a) {
  return Unary<T>(
      "tanh", a, [](T x) { return std::tanh(x); },
      [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Var<T> Sigmoid(Var<T> a) {
  return Unary<T>(
      "sigmoid", a,
      [](T x) {
        if (x >= 0) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> Exp(Var<T> a) {
  return Unary<T>(
      "exp", a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Var<T> Log(Var<T> a) {
  return Unary<T>(
      "log", a, [](T x) { return std::log(x); },
      [](T x, T) { return T(1) / x; });
}

template <typename T>
Var<T> Abs(Var<T> a) {
  return Unary<T>(
      "abs", a, [](T x) { return std::abs(x); },
      [](T x, T) { return x > 0 ? T(1) : (x < 0 ? T(-1) : T(0)); });
}

template <typename T>
Var<T> Softplus(Var<T> a) {
  return Unary<T>(
      "softplus", a,
      [](T x) { return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x))); },
      [](T x, T) {
        if (x >= 0) return T(1) / (T(1) + std::exp(-x));
        const T e = std::exp(x);
        return e / (T(1) + e);
      });
}

template <typename T>
Var<T> Square(Var<T> a) {
  return Unary<T>(
      "square", a, [](T x) { return x * x; },
      [](T x, T) { return T(2) * x; });
}

template <typename T>
Var<T> Softmax(Var<T> a) {
  RequireMatrix("softmax", a);
  const Tensor<T>& x = a.value();
  Tensor<T> y(x.shape());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    T mx = x(r, 0);
    for (std::size_t c = 1; c < x.cols(); ++c) mx = std::max(mx, x(r, c));
    T total = 0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      y(r, c) = std::exp(x(r, c) - mx);
      total += y(r, c);
    }
    for (std::size_t c = 0; c < x.cols(); ++c) y(r, c) /= total;
  }
  const std::size_t ia = a.index();
  return a.tape()->Push(std::move(y), {a}, [ia](Tape<T>& t,
                                                std::size_t self) {
    if (!t.NeedsGrad(ia)) return;
    const Tensor<T>& y = t.Value(self);
    const Tensor<T>& gy = t.Grad(self);
    Tensor<T>& gx = t.Grad(ia);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      T dot = 0;
      for (std::size_t c = 0; c < y.cols(); ++c) dot += gy(r, c) * y(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) {
        gx(r, c) += y(r, c) * (gy(r, c) - dot);
      }
    }
  });
}

template <typename T>
Var<T> Sum(Var<T> a) {
  RequireMatrix("sum", a);
  T total = 0;
  for (T v : a.value().values()) total += v;
  const std::size_t ia = a.index();
  return a.tape()->Push(Tensor<T>::Scalar(total), {a},
                        [ia](Tape<T>& t, std::size_t self) {
                          if (!t.NeedsGrad(ia)) return;
                          const T g = t.Grad(self)[0];
                          for (T& v : t.Grad(ia).values()) v += g;
                        });
}

template <typename T>
Var<T> Mean(Var<T> a) {
  RequireMatrix("mean", a);
  T total = 0;
  for (T v : a.value().values()) total += v;
  const T n = static_cast<T>(a.value().size());
  const std::size_t ia = a.index();
  return a.tape()->Push(Tensor<T>::Scalar(total / n), {a},
                        [ia, n](Tape<T>& t, std::size_t self) {
                          if (!t.NeedsGrad(ia)) return;
                          const T g = t.Grad(self)[0] / n;
                          for (T& v : t.Grad(ia).values()) v += g;
                        });
}

template <typename T>
Var<T> SumRows(Var<T> a) {
  RequireMatrix("sum_rows", a);
  const Tensor<T>& x = a.value();
  Tensor<T> y({1, x.cols()});
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) y(0, c) += x(r, c);
  }
  const std::size_t ia = a.index();
  return a.tape()->Push(std::move(y), {a}, [ia](Tape<T>& t,
                                                std::size_t self) {
    if (!t.NeedsGrad(ia)) return;
    const Tensor<T>& gy = t.Grad(self);
    Tensor<T>& gx = t.Grad(ia);
    for (std::size_t r = 0; r < gx.rows(); ++r) {
      for (std::size_t c = 0; c < gx.cols(); ++c) gx(r, c) += gy(0, c);
    }
  });
}

template <typename T>
Var<T> ConcatCols(const std::vector<Var<T>>& parts) {
  return Concat("concat_cols", parts, true);
}
template <typename T>
Var<T> ConcatRows(const std::vector<Var<T>>& parts) {
  return Concat("concat_rows", parts, false);
}

template <typename T>
Var<T> SliceRows(Var<T> a, std::size_t begin, std::size_t end) {
  return Slice("slice_rows", a, begin, end, false);
}
template <typename T>
Var<T> SliceCols(Var<T> a, std::size_t begin, std::size_t end) {
  return Slice("slice_cols", a, begin, end, true);
}

template <typename T>
Var<T> Reshape(Var<T> a, std::size_t rows, std::size_t cols) {
  if (!a.valid()) Fail("reshape", "invalid operand");
  const Tensor<T>& x = a.value();
  if (rows * cols != x.size()) {
    Fail("reshape", "cannot view " + ShapeToString(x.shape()) + " as [" +
                        std::to_string(rows) + "x" + std::to_string(cols) +
                        "]");
  }
  std::vector<T> data(x.values().begin(), x.values().end());
  const std::size_t ia = a.index();
  return a.tape()->Push(Tensor<T>({rows, cols}, std::move(data)), {a},
                        [ia](Tape<T>& t, std::size_t self) {
                          if (!t.NeedsGrad(ia)) return;
                          AddInto(t.Grad(ia), t.Grad(self));
                        });
}

template <typename T>
Var<T> GatherRows(Var<T> table, std::span<const int> indices) {
  RequireMatrix("gather_rows", table);
  const Tensor<T>& x = table.value();
  if (indices.empty()) Fail("gather_rows", "no indices");
  Tensor<T> y({indices.size(), x.cols()});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int row = indices[i];
    if (row < 0 || static_cast<std::size_t>(row) >= x.rows()) {
      Fail("gather_rows", "index " + std::to_string(row) +
                              " out of range for table " +
                              ShapeToString(x.shape()));
    }
    for (std::size_t c = 0; c < x.cols(); ++c) y(i, c) = x(row, c);
  }
  std::vector<int> ids(indices.begin(), indices.end());
  const std::size_t ia = table.index();
  return table.tape()->Push(std::move(y), {table}, [ia, ids](
                                                       Tape<T>& t,
                                                       std::size_t self) {
    if (!t.NeedsGrad(ia)) return;
    const Tensor<T>& gy = t.Grad(self);
    Tensor<T>& gx = t.Grad(ia);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t c = 0; c < gy.cols(); ++c) gx(ids[i], c) += gy(i, c);
    }
  });
}

template <typename T>
Var<T> Conv1d(Var<T> input, Var<T> weight, Var<T> bias, std::size_t padding) {
  constexpr std::string_view op = "conv1d";
  RequireMatrix(op, input);
  RequireMatrix(op, bias);
  Tape<T>& tape = SameTape(op, input, weight);
  SameTape(op, input, bias);
  const Tensor<T>& x = input.value();
  const Tensor<T>& w = weight.value();
  const Tensor<T>& b = bias.value();
  if (w.rank() != 3) {
    Fail(op, "weight must be [kernel x in x out], got " +
                 ShapeToString(w.shape()));
  }
  const std::size_t len = x.rows(), cin = x.cols();
  const std::size_t kernel = w.dim(0), cout = w.dim(2);
  if (w.dim(1) != cin) {
    Fail(op, "input has " + std::to_string(cin) + " channels but weight " +
                 ShapeToString(w.shape()) + " expects " +
                 std::to_string(w.dim(1)));
  }
  if (b.rows() != 1 || b.cols() != cout) {
    Fail(op, "bias " + ShapeToString(b.shape()) + " does not match " +
                 std::to_string(cout) + " output channels");
  }
  if (len + 2 * padding < kernel) {
    Fail(op, "input length " + std::to_string(len) +
                 " shorter than kernel " + std::to_string(kernel));
  }
  const std::size_t out_len = len + 2 * padding - kernel + 1;
  Tensor<T> y({out_len, cout});
  for (std::size_t t = 0; t < out_len; ++t) {
    T* yrow = &y(t, 0);
    for (std::size_t o = 0; o < cout; ++o) yrow[o] = b(0, o);
    for (std::size_t k = 0; k < kernel; ++k) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + k) -
                                 static_cast<std::ptrdiff_t>(padding);
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
      for (std::size_t c = 0; c < cin; ++c) {
        const T xv = x(static_cast<std::size_t>(src), c);
        const T* wrow = &w[(k * cin + c) * cout];
        for (std::size_t o = 0; o < cout; ++o) yrow[o] += xv * wrow[o];
      }
    }
  }
  const std::size_t ix = input.index(), iw = weight.index(),
                    ib = bias.index();
  return tape.Push(
      std::move(y), {input, weight, bias},
      [ix, iw, ib, padding](Tape<T>& t, std::size_t self) {
        const Tensor<T>& gy = t.Grad(self);
        const Tensor<T>& x = t.Value(ix);
        const Tensor<T>& w = t.Value(iw);
        const std::size_t len = x.rows(), cin = x.cols();
        const std::size_t kernel = w.dim(0), cout = w.dim(2);
        Tensor<T>* gx = t.NeedsGrad(ix) ? &t.Grad(ix) : nullptr;
        Tensor<T>* gw = t.NeedsGrad(iw) ? &t.Grad(iw) : nullptr;
        if (t.NeedsGrad(ib)) {
          Tensor<T>& gb = t.Grad(ib);
          for (std::size_t r = 0; r < gy.rows(); ++r) {
            for (std::size_t o = 0; o < cout; ++o) gb(0, o) += gy(r, o);
          }
        }
        if (!gx && !gw) return;
        for (std::size_t r = 0; r < gy.rows(); ++r) {
          const T* grow = &gy(r, 0);
          for (std::size_t k = 0; k < kernel; ++k) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(r + k) -
                                       static_cast<std::ptrdiff_t>(padding);
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
            const std::size_t s = static_cast<std::size_t>(src);
            for (std::size_t c = 0; c < cin; ++c) {
              const std::size_t base = (k * cin + c) * cout;
              if (gx) {
                T acc = 0;
                for (std::size_t o = 0; o < cout; ++o) {
                  acc += grow[o] * w[base + o];
                }
                (*gx)(s, c) += acc;
              }
              if (gw) {
                const T xv = x(s, c);
                for (std::size_t o = 0; o < cout; ++o) {
                  (*gw)[base + o] += xv * grow[o];
                }
              }
            }
          }
        }
      });
}

template <typename T>
Var<T> Apply(Primitive p, std::span<const Var<T>> in) {
  auto arity = [&](std::size_t n) {
    if (in.size() != n) {
      Fail(PrimitiveName(p), "expects " + std::to_string(n) +
                                 " operands, got " +
                                 std::to_string(in.size()));
    }
  };
  switch (p) {
    case Primitive::kMatMul: arity(2); return MatMul(in[0], in[1]);
    case Primitive::kAdd: arity(2); return Add(in[0], in[1]);
    case Primitive::kSub: arity(2); return Sub(in[0], in[1]);
    case Primitive::kMul: arity(2); return Mul(in[0], in[1]);
    case Primitive::kTanh: arity(1); return Tanh(in[0]);
    case Primitive::kSigmoid: arity(1); return Sigmoid(in[0]);
    case Primitive::kExp: arity(1); return Exp(in[0]);
    case Primitive::kLog: arity(1); return Log(in[0]);
    case Primitive::kAbs: arity(1); return Abs(in[0]);
    case Primitive::kSoftplus: arity(1); return Softplus(in[0]);
    case Primitive::kSoftmax: arity(1); return Softmax(in[0]);
    case Primitive::kSum: arity(1); return Sum(in[0]);
    case Primitive::kMean: arity(1); return Mean(in[0]);
    case Primitive::kSumRows: arity(1); return SumRows(in[0]);
    case Primitive::kConcatCols:
      return ConcatCols(std::vector<Var<T>>(in.begin(), in.end()));
    case Primitive::kConcatRows:
      return ConcatRows(std::vector<Var<T>>(in.begin(), in.end()));
  }
  Fail(PrimitiveName(p), "unsupported primitive");
}

#define POLYLOOP_INSTANTIATE_OPS(T)                                          \
  template Var<T> Apply(Primitive, std::span<const Var<T>>);                 \
  template Var<T> MatMul(Var<T>, Var<T>);                                    \
  template Var<T> Add(Var<T>, Var<T>);                                       \
  template Var<T> Sub(Var<T>, Var<T>);                                       \
  template Var<T> Mul(Var<T>, Var<T>);                                       \
  template Var<T> Scale(Var<T>, T);                                          \
  template Var<T> AddScalar(Var<T>, T);                                      \
  template Var<T> Tanh(Var<T>);                                              \
  template Var<T> Sigmoid(Var<T>);                                           \
  template Var<T> Exp(Var<T>);                                               \
  template Var<T> Log(Var<T>);                                               \
  template Var<T> Abs(Var<T>);                                               \
  template Var<T> Softplus(Var<T>);                                          \
  template Var<T> Square(Var<T>);                                            \
  template Var<T> Softmax(Var<T>);                                           \
  template Var<T> Sum(Var<T>);                                               \
  template Var<T> Mean(Var<T>);                                              \
  template Var<T> SumRows(Var<T>);                                           \
  template Var<T> ConcatCols(const std::vector<Var<T>>&);                    \
  template Var<T> ConcatRows(const std::vector<Var<T>>&);                    \
  template Var<T> SliceRows(Var<T>, std::size_t, std::size_t);               \
  template Var<T> SliceCols(Var<T>, std::size_t, std::size_t);               \
  template Var<T> Reshape(Var<T>, std::size_t, std::size_t);                 \
  template Var<T> GatherRows(Var<T>, std::span<const int>);                  \
  template Var<T> Conv1d(Var<T>, Var<T>, Var<T>, std::size_t);

POLYLOOP_INSTANTIATE_OPS(float)
POLYLOOP_INSTANTIATE_OPS(double)

#undef POLYLOOP_INSTANTIATE_OPS

}  // namespace polyloop::num
