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

#ifndef POLYLOOP_NUMCORE_PARAMETERS_H_
#define POLYLOOP_NUMCORE_PARAMETERS_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "polyloop/common/random.h"
#include "polyloop/numcore/tensor.h"

namespace polyloop::num {

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;  // same shape as value
};

// Named, ordered parameter collection. Addresses are stable for the
// lifetime of the store, so tapes may hold raw pointers to entries.
template <typename T>
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore& other);
  ParameterStore& operator=(const ParameterStore& other);
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  Parameter<T>& Add(const std::string& name, Tensor<T> value);

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  Parameter<T>& AddUniform(const std::string& name, Shape shape,
                           std::size_t fan_in, Rng& rng);

  bool Contains(const std::string& name) const {
    return index_.count(name) != 0;
  }
  Parameter<T>& Get(const std::string& name);
  const Parameter<T>& Get(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  Parameter<T>& at(std::size_t i) { return *params_[i]; }
  const Parameter<T>& at(std::size_t i) const { return *params_[i]; }

  std::size_t ScalarCount() const;
  void ZeroGrad();

 private:
  std::vector<std::unique_ptr<Parameter<T>>> params_;
  std::map<std::string, std::size_t> index_;
};

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;

}  // namespace polyloop::num

#endif  // POLYLOOP_NUMCORE_PARAMETERS_H_
