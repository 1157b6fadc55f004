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

#include "checkpoint.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace dsea {

namespace {

class Writer {
 public:
  template <typename U>
  void put(U v) {
    static_assert(std::is_trivially_copyable_v<U>);
    std::uint8_t raw[sizeof(U)];
    std::memcpy(raw, &v, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(U));
    out.insert(out.end(), raw, raw + sizeof(U));
  }
  void put_bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  Bytes out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename U>
  U get(const char* what) {
    need(sizeof(U), what);
    std::uint8_t raw[sizeof(U)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(U));
    pos_ += sizeof(U);
    U v;
    std::memcpy(&v, raw, sizeof(U));
    return v;
  }
  std::string get_string(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) throw LoadError(std::string("checkpoint truncated reading ") + what);
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

Bytes serialize_checkpoint(const ParamStore<float>& params, const ModelConfig& cfg) {
  Writer w;
  w.put_bytes("DSEA", 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.base_width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.levels));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.blocks_per_level));
  w.put<double>(cfg.pooling_ratio);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.dct_groups));
  w.put<std::uint8_t>(cfg.enable_dfesa);
  w.put<std::uint8_t>(cfg.enable_sfm);
  w.put<std::uint8_t>(cfg.plain_attention);
  w.put<std::uint64_t>(cfg.seed);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    for (float v : t.data()) {
      if (!std::isfinite(v)) throw NumericError("non-finite value in parameter " + name);
    }
    w.put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.put_bytes(name.data(), name.size());
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d = 0; d < t.rank(); ++d) w.put<std::uint32_t>(static_cast<std::uint32_t>(t.dim(d)));
    for (float v : t.data()) w.put<float>(v);
  }
  w.put<std::uint32_t>(crc_of(w.out));
  return std::move(w.out);
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw LoadError("checkpoint truncated: " + std::to_string(bytes.size()) + " bytes");
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  const auto stored_crc = tail.get<std::uint32_t>("crc");
  if (crc_of(body) != stored_crc) throw LoadError("checkpoint CRC mismatch");

  Reader r(body);
  if (r.get_string(4, "magic") != "DSEA") throw LoadError("checkpoint magic is not DSEA");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw LoadError("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig cfg;
  cfg.base_width = static_cast<int>(r.get<std::uint32_t>("base_width"));
  cfg.levels = static_cast<int>(r.get<std::uint32_t>("levels"));
  cfg.blocks_per_level = static_cast<int>(r.get<std::uint32_t>("blocks_per_level"));
  cfg.pooling_ratio = r.get<double>("pooling_ratio");
  cfg.dct_groups = static_cast<int>(r.get<std::uint32_t>("dct_groups"));
  cfg.enable_dfesa = r.get<std::uint8_t>("enable_dfesa") != 0;
  cfg.enable_sfm = r.get<std::uint8_t>("enable_sfm") != 0;
  cfg.plain_attention = r.get<std::uint8_t>("plain_attention") != 0;
  cfg.seed = r.get<std::uint64_t>("seed");
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw LoadError(std::string("checkpoint config invalid: ") + e.what());
  }

  const ParamStore<float> fresh = build_model<float>(cfg);
  const auto count = r.get<std::uint32_t>("tensor count");
  if (count != fresh.size()) {
    throw LoadError("checkpoint holds " + std::to_string(count) + " tensors, config expects " +
                    std::to_string(fresh.size()));
  }
  ParamStore<float> store;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint16_t>("name length");
    const std::string name = r.get_string(len, "name");
    if (!is_canonical_name(name)) throw LoadError("non-canonical tensor name '" + name + "'");
    if (!fresh.contains(name)) throw LoadError("unexpected tensor '" + name + "'");
    const auto rank = r.get<std::uint8_t>("rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.get<std::uint32_t>("dims");
    const auto& expected = fresh.at(name).shape();
    if (shape != expected) {
      throw LoadError("shape disagreement for tensor '" + name + "': file " + shape_str(shape) +
                      ", model " + shape_str(expected));
    }
    std::vector<float> values(static_cast<std::size_t>(shape_numel(shape)));
    for (auto& v : values) v = r.get<float>("payload");
    if (store.contains(name)) throw LoadError("duplicate tensor '" + name + "'");
    store.insert(name, Tensor<float>::from_values(shape, std::move(values), true));
  }
  if (!r.at_end()) throw LoadError("trailing bytes after last tensor");
  return {cfg, std::move(store)};
}

void save_checkpoint(const ParamStore<float>& params, const ModelConfig& cfg,
                     const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(params, cfg));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Bytes bytes;
  try {
    bytes = read_file(path);
  } catch (const DataError& e) {
    throw LoadError(e.what());
  }
  try {
    return parse_checkpoint(bytes);
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace dsea
