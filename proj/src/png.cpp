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

#include "png.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace dsea {

namespace {

// Releases libpng's simplified-API state on every exit path.
struct ImageGuard {
  png_image* image;
  ~ImageGuard() { png_image_free(image); }
};

}  // namespace

std::uint8_t quantize_unit(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

Tensor<float> decode_png(std::span<const std::uint8_t> bytes, const std::string& context) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  ImageGuard guard{&image};
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw DecodeError(context + ": " + image.message);
  }
  // Only 8-bit truecolor, with or without alpha, is accepted.
  if (!(image.format & PNG_FORMAT_FLAG_COLOR) || (image.format & PNG_FORMAT_FLAG_COLORMAP)) {
    throw DecodeError(context + ": unsupported color type (need RGB or RGBA)");
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) throw DecodeError(context + ": unsupported bit depth 16");
  // Read with alpha when present and drop it here, so color values are never
  // composited against a background.
  const bool alpha = image.format & PNG_FORMAT_FLAG_ALPHA;
  image.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  const int channels = alpha ? 4 : 3;
  const std::int64_t h = image.height, w = image.width;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    throw DecodeError(context + ": " + image.message);
  }
  std::vector<float> v(static_cast<std::size_t>(3 * h * w));
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x)
      for (int ch = 0; ch < 3; ++ch)
        v[(ch * h + y) * w + x] = static_cast<float>(pixels[(y * w + x) * channels + ch] / 255.0);
  return Tensor<float>::from_values({3, h, w}, std::move(v));
}

Bytes encode_png(const Tensor<float>& img) {
  if (img.rank() != 3 || img.dim(0) != 3) {
    throw ShapeError("encode_png: expected [3,H,W], got " + shape_str(img.shape()));
  }
  const std::int64_t h = img.dim(1), w = img.dim(2);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(3 * h * w));
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x)
      for (int ch = 0; ch < 3; ++ch) pixels[(y * w + x) * 3 + ch] = quantize_unit(img.data()[(ch * h + y) * w + x]);

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  ImageGuard guard{&image};
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(std::string("encode_png: ") + image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(std::string("encode_png: ") + image.message);
  }
  out.resize(size);
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Tensor<float> read_png(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  return decode_png(bytes, path.string());
}

void write_png(const std::filesystem::path& path, const Tensor<float>& img) {
  write_file_atomic(path, encode_png(img));
}

}  // namespace dsea
