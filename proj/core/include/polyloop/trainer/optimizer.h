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

#ifndef POLYLOOP_TRAINER_OPTIMIZER_H_
#define POLYLOOP_TRAINER_OPTIMIZER_H_

#include <vector>

#include "polyloop/numcore/parameters.h"

namespace polyloop::trainer {

struct SgdConfig {
  double learning_rate = 0.1;
  double momentum = 0.75;
  std::size_t batch_size = 32;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-8;
  std::size_t batch_size = 64;
};

// Heavy-ball momentum: v <- mu v + g; p <- p - lr v.
template <typename T>
class MomentumSgd {
 public:
  explicit MomentumSgd(SgdConfig config) : config_(config) {}
  void Step(num::ParameterStore<T>& params);

 private:
  SgdConfig config_;
  std::vector<num::Tensor<T>> velocity_;
};

// Adam with bias-corrected moments.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}
  void Step(num::ParameterStore<T>& params);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<num::Tensor<T>> m_, v_;
};

// Global L2 norm of all gradients.
template <typename T>
double GradientNorm(const num::ParameterStore<T>& params);

// Rescales gradients so their global norm is at most `max_norm`; returns
// the norm before clipping. max_norm <= 0 disables clipping.
template <typename T>
double ClipGradients(num::ParameterStore<T>& params, double max_norm);

extern template class MomentumSgd<float>;
extern template class MomentumSgd<double>;
extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace polyloop::trainer

#endif  // POLYLOOP_TRAINER_OPTIMIZER_H_
