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
#include <span>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace dsea {

using Bytes = std::vector<std::uint8_t>;

// Decodes an 8-bit RGB or RGBA PNG (alpha is dropped) into [3,H,W] values
// byte / 255. `context` (usually the file name) prefixes error messages.
Tensor<float> decode_png(std::span<const std::uint8_t> bytes, const std::string& context = "png");

// 8-bit RGB PNG. Values are clamped to [0,1] and rounded half up.
Bytes encode_png(const Tensor<float>& img);

std::uint8_t quantize_unit(double v);

Bytes read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so a failed
// write never leaves a partial file at `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

Tensor<float> read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Tensor<float>& img);

}  // namespace dsea
