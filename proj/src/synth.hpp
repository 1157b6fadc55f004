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
#include <filesystem>

#include "dataset.hpp"

namespace dsea {

// Clean target made of smooth color fields, soft discs and stripes; input is
// the target under a depth-dependent veil with red attenuation.
ImagePair synthesize_pair(std::int64_t height, std::int64_t width, std::uint64_t seed);

// Writes <root>/input and <root>/target with `count` pairs named 0000.png...
void write_synthetic_dataset(const std::filesystem::path& root, int count, std::int64_t height,
                             std::int64_t width, std::uint64_t seed);

}  // namespace dsea
