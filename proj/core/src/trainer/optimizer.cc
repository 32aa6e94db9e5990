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

#include "polyloop/trainer/optimizer.h"

#include <cmath>

namespace polyloop::trainer {

namespace {

template <typename T>
void EnsureState(std::vector<num::Tensor<T>>& state,
                 const num::ParameterStore<T>& params) {
  if (state.size() == params.size()) return;
  state.clear();
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.emplace_back(params.at(i).value.shape());
  }
}

}  // namespace

template <typename T>
void MomentumSgd<T>::Step(num::ParameterStore<T>& params) {
  EnsureState(velocity_, params);
  const T lr = static_cast<T>(config_.learning_rate);
  const T mu = static_cast<T>(config_.momentum);
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& param = params.at(p);
    auto& v = velocity_[p];
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      v[i] = mu * v[i] + param.grad[i];
      param.value[i] -= lr * v[i];
    }
  }
}

template <typename T>
void Adam<T>::Step(num::ParameterStore<T>& params) {
  EnsureState(m_, params);
  EnsureState(v_, params);
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& param = params.at(p);
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      const double g = param.grad[i];
      m[i] = static_cast<T>(b1 * m[i] + (1 - b1) * g);
      v[i] = static_cast<T>(b2 * v[i] + (1 - b2) * g * g);
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      param.value[i] -= static_cast<T>(config_.learning_rate * mhat /
                                       (std::sqrt(vhat) + config_.epsilon));
    }
  }
}

template <typename T>
double GradientNorm(const num::ParameterStore<T>& params) {
  double sq = 0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (T g : params.at(p).grad.values()) {
      sq += static_cast<double>(g) * static_cast<double>(g);
    }
  }
  return std::sqrt(sq);
}

template <typename T>
double ClipGradients(num::ParameterStore<T>& params, double max_norm) {
  const double norm = GradientNorm(params);
  if (max_norm > 0 && norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (std::size_t p = 0; p < params.size(); ++p) {
      for (T& g : params.at(p).grad.values()) g *= scale;
    }
  }
  return norm;
}

template class MomentumSgd<float>;
template class MomentumSgd<double>;
template class Adam<float>;
template class Adam<double>;
template double GradientNorm(const num::ParameterStore<float>&);
template double GradientNorm(const num::ParameterStore<double>&);
template double ClipGradients(num::ParameterStore<float>&, double);
template double ClipGradients(num::ParameterStore<double>&, double);

}  // namespace polyloop::trainer
