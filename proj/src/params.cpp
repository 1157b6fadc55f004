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

#include "params.hpp"

#include <cmath>

namespace dsea {

template <typename T>
void ParamStore<T>::insert(const std::string& name, Tensor<T> tensor) {
  if (!map_.emplace(name, std::move(tensor)).second) {
    throw ConfigError("duplicate parameter name " + name);
  }
}

template <typename T>
const Tensor<T>& ParamStore<T>::at(const std::string& name) const {
  auto it = map_.find(name);
  if (it == map_.end()) throw ConfigError("missing parameter " + name);
  return it->second;
}

template <typename T>
std::int64_t ParamStore<T>::element_count() const {
  std::int64_t n = 0;
  for (const auto& [name, t] : map_) n += static_cast<std::int64_t>(t.numel());
  return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& [name, t] : map_) {
    Tensor<T> handle = t;
    handle.zero_grad();
  }
}

std::uint64_t name_seed(std::uint64_t seed, const std::string& name) {
  // FNV-1a over the name, mixed with the model seed.
  std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename T>
void instantiate_params(ParamStore<T>& store, const std::string& prefix,
                        const std::vector<ParamSpec>& specs, std::uint64_t seed) {
  for (const auto& spec : specs) {
    const std::string name = prefix + spec.name;
    Tensor<T> t;
    switch (spec.init) {
      case InitKind::he_uniform: {
        // Kaiming-uniform with negative slope sqrt(5): gain sqrt(1/3), bound 1/sqrt(fan_in).
        const double bound = std::sqrt(1.0 / static_cast<double>(spec.fan_in));
        t = Tensor<T>::uniform(spec.shape, -bound, bound, name_seed(seed, name), true);
        break;
      }
      case InitKind::zeros:
        t = Tensor<T>::zeros(spec.shape, true);
        break;
      case InitKind::ones:
        t = Tensor<T>::ones(spec.shape, true);
        break;
      case InitKind::constant:
        t = Tensor<T>::full(spec.shape, static_cast<T>(spec.value), true);
        break;
    }
    store.insert(name, std::move(t));
  }
}

template class ParamStore<float>;
template class ParamStore<double>;
template void instantiate_params(ParamStore<float>&, const std::string&,
                                 const std::vector<ParamSpec>&, std::uint64_t);
template void instantiate_params(ParamStore<double>&, const std::string&,
                                 const std::vector<ParamSpec>&, std::uint64_t);

}  // namespace dsea
