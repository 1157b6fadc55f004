// Copyright 2026 The dsea Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace dsea {

enum class InitKind { he_uniform, zeros, ones, constant };

// Declarative description of one learnable tensor. Modules publish these so
// the model builder can allocate and seed them under canonical names.
struct ParamSpec {
  std::string name;
  Shape shape;
  InitKind init = InitKind::zeros;
  double value = 0.0;       // for InitKind::constant
  std::int64_t fan_in = 1;  // for InitKind::he_uniform
};

// Ordered name -> tensor map. Iteration order is lexicographic by name.
template <typename T>
class ParamStore {
 public:
  using Map = std::map<std::string, Tensor<T>>;

  void insert(const std::string& name, Tensor<T> tensor);
  bool contains(const std::string& name) const { return map_.count(name) != 0; }
  const Tensor<T>& at(const std::string& name) const;
  std::size_t size() const { return map_.size(); }
  std::int64_t element_count() const;

  typename Map::const_iterator begin() const { return map_.begin(); }
  typename Map::const_iterator end() const { return map_.end(); }

  void zero_grad();

  // Deep copy into another precision, with requires_grad set on every tensor.
  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& [name, t] : map_) {
      std::vector<U> v(t.data().begin(), t.data().end());
      out.insert(name, Tensor<U>::from_values(t.shape(), std::move(v), true));
    }
    return out;
  }

 private:
  Map map_;
};

// Materializes specs into `store` under `prefix`. Each tensor's random stream
// is seeded from (seed, full name), so the result does not depend on the
// order of insertion.
template <typename T>
void instantiate_params(ParamStore<T>& store, const std::string& prefix,
                        const std::vector<ParamSpec>& specs, std::uint64_t seed);

std::uint64_t name_seed(std::uint64_t seed, const std::string& name);

}  // namespace dsea
