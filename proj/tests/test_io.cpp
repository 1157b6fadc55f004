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

#include <zlib.h>

#include <cmath>
#include <cstring>

#include "checkpoint.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "network.hpp"
#include "png.hpp"

using namespace dsea;

namespace {

// Minimal independent PNG writer for arbitrary color types.
void put_chunk(Bytes& out, const char* type, const Bytes& data) {
  const std::uint32_t n = static_cast<std::uint32_t>(data.size());
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(n >> s));
  Bytes body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  out.insert(out.end(), body.begin(), body.end());
  const std::uint32_t c = static_cast<std::uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size())));
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(c >> s));
}

Bytes make_png(std::uint32_t w, std::uint32_t h, std::uint8_t color, int channels, std::uint8_t fill) {
  Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  Bytes ihdr = {std::uint8_t(w >> 24), std::uint8_t(w >> 16), std::uint8_t(w >> 8), std::uint8_t(w),
                std::uint8_t(h >> 24), std::uint8_t(h >> 16), std::uint8_t(h >> 8), std::uint8_t(h),
                8, color, 0, 0, 0};
  put_chunk(out, "IHDR", ihdr);
  Bytes raw;
  for (std::uint32_t y = 0; y < h; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), w * channels, fill);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  Bytes z(len);
  REQUIRE(compress(z.data(), &len, raw.data(), static_cast<uLong>(raw.size())) == Z_OK);
  z.resize(len);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});
  return out;
}

}  // namespace

TEST_CASE("decode_png reads externally encoded pixels") {
  const auto white = decode_png(make_png(3, 2, 2, 3, 255));
  CHECK(white.shape() == Shape{3, 2, 3});
  for (float v : white.data()) CHECK(v == 1.0f);
  const auto black = decode_png(make_png(2, 2, 6, 4, 0));
  CHECK(black.shape() == Shape{3, 2, 2});
  for (float v : black.data()) CHECK(v == 0.0f);
  CHECK_THROWS_AS(decode_png(make_png(2, 2, 0, 1, 7)), DecodeError);
}

TEST_CASE("quantize_unit rounds half up and saturates") {
  CHECK(quantize_unit(0.5) == 128);
  CHECK(quantize_unit(1.7) == 255);
  CHECK(quantize_unit(-0.2) == 0);
  CHECK(quantize_unit(1.0) == 255);
}

TEST_CASE("png round trip") {
  const auto img = Tensor<float>::uniform({3, 7, 5}, 0, 1, 9);
  const auto back = decode_png(encode_png(img));
  CHECK(back.shape() == img.shape());
  CHECK(testing::max_abs_diff(back.data(), img.data()) <= 1.0 / 510 + 1e-7);
}

TEST_CASE("png corruption is rejected") {
  const auto bytes = encode_png(Tensor<float>::uniform({3, 4, 4}, 0, 1, 2));
  Bytes bad = bytes;
  bad[bad.size() / 2] ^= 0x5a;
  CHECK_THROWS_AS(decode_png(bad), DecodeError);
  // Cut inside the image data: the 12-byte IEND and the IDAT CRC are gone.
  CHECK_THROWS_AS(decode_png(std::span(bytes).first(bytes.size() - 20)), DecodeError);
  CHECK_THROWS_AS(decode_png(std::span(bytes).first(8)), DecodeError);
  Bytes not_png = bytes;
  not_png[1] = 'Q';
  CHECK_THROWS_AS(decode_png(not_png), DecodeError);
}

TEST_CASE("checkpoint save load save is byte-identical") {
  testing::TempDir dir("ckpt");
  ModelConfig cfg;
  cfg.base_width = 8;
  cfg.pooling_ratio = 0.5;
  cfg.seed = 42;
  const auto params = build_model<float>(cfg);
  const auto a = dir.path() / "a.ckpt";
  const auto b = dir.path() / "b.ckpt";
  save_checkpoint(params, cfg, a);
  const auto loaded = load_checkpoint(a);
  CHECK(loaded.config == cfg);
  CHECK(loaded.params.size() == params.size());
  save_checkpoint(loaded.params, loaded.config, b);
  CHECK(read_file(a) == read_file(b));
}

TEST_CASE("checkpoint damage is a LoadError") {
  ModelConfig cfg;
  cfg.base_width = 8;
  const auto bytes = serialize_checkpoint(build_model<float>(cfg), cfg);

  CHECK_THROWS_AS(parse_checkpoint(std::span(bytes).first(bytes.size() - 9)), LoadError);
  CHECK_THROWS_AS(parse_checkpoint(std::span(bytes).first(3)), LoadError);
  Bytes flipped = bytes;
  flipped[bytes.size() / 2] ^= 1;
  CHECK_THROWS_AS(parse_checkpoint(flipped), LoadError);

  // Alter one dimension of the first tensor and fix the trailing CRC so the
  // shape check, not the checksum, has to catch it.
  const std::size_t header = 4 + 4 + 4 * 3 + 8 + 4 + 3 + 8 + 4;
  const std::uint16_t name_len = static_cast<std::uint16_t>(bytes[header] | (bytes[header + 1] << 8));
  const std::string name(bytes.begin() + header + 2, bytes.begin() + header + 2 + name_len);
  CHECK(is_canonical_name(name));
  Bytes mutated = bytes;
  const std::size_t dim0 = header + 2 + name_len + 1;
  mutated[dim0] += 1;
  const std::size_t body = mutated.size() - 4;
  const std::uint32_t crc = static_cast<std::uint32_t>(crc32(0L, mutated.data(), static_cast<uInt>(body)));
  std::memcpy(mutated.data() + body, &crc, 4);
  try {
    parse_checkpoint(mutated);
    FAIL("mutated checkpoint was accepted");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("'" + name + "'") != std::string::npos);
  }

  testing::TempDir dir("ckpt_missing");
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "none.ckpt"), LoadError);
}
