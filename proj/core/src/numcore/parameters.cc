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

#include "polyloop/numcore/parameters.h"

#include <cmath>

namespace polyloop::num {

template <typename T>
ParameterStore<T>::ParameterStore(const ParameterStore& other)
    : index_(other.index_) {
  params_.reserve(other.params_.size());
  for (const auto& p : other.params_) {
    params_.push_back(std::make_unique<Parameter<T>>(*p));
  }
}

template <typename T>
ParameterStore<T>& ParameterStore<T>::operator=(const ParameterStore& other) {
  if (this != &other) {
    ParameterStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
Parameter<T>& ParameterStore<T>::Add(const std::string& name,
                                     Tensor<T> value) {
  if (Contains(name)) throw ValidationError("duplicate parameter " + name);
  Tensor<T> grad(value.shape());
  index_[name] = params_.size();
  params_.push_back(std::make_unique<Parameter<T>>(
      Parameter<T>{name, std::move(value), std::move(grad)}));
  return *params_.back();
}

template <typename T>
Parameter<T>& ParameterStore<T>::AddUniform(const std::string& name,
                                            Shape shape, std::size_t fan_in,
                                            Rng& rng) {
  Tensor<T> value(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (T& v : value.values()) v = static_cast<T>(rng.Uniform(-bound, bound));
  return Add(name, std::move(value));
}

template <typename T>
Parameter<T>& ParameterStore<T>::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter " + name);
  return *params_[it->second];
}

template <typename T>
const Parameter<T>& ParameterStore<T>::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter " + name);
  return *params_[it->second];
}

template <typename T>
std::size_t ParameterStore<T>::ScalarCount() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

template <typename T>
void ParameterStore<T>::ZeroGrad() {
  for (auto& p : params_) p->grad.Fill(T(0));
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace polyloop::num
