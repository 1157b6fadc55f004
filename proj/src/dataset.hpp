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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "network.hpp"
#include "tensor.hpp"

namespace dsea {

struct ImagePair {
  Tensor<float> input;   // [3,H,W] in [0,1]
  Tensor<float> target;  // same extent as input
  std::string id;        // file name
};

// Layout: <root>/input/*.png and <root>/target/*.png, paired by file name.
struct DatasetSpec {
  std::filesystem::path root;
  int patch = 64;
  bool flips = true;
  std::uint64_t seed = 0;
};

using Rng = std::mt19937_64;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Same crop window on input and target, corner uniform over valid positions.
ImagePair sample_patch(const ImagePair& pair, int patch, Rng& rng);

// Independent horizontal and vertical flips, each with probability 1/2.
ImagePair augment_flip(const ImagePair& pair, Rng& rng);

Tensor<float> flip_horizontal(const Tensor<float>& img);
Tensor<float> flip_vertical(const Tensor<float>& img);
Tensor<float> crop(const Tensor<float>& img, std::int64_t top, std::int64_t left, std::int64_t height,
                   std::int64_t width);
// Edge-replicates the bottom and right borders up to the requested extent.
Tensor<float> pad_edge(const Tensor<float>& img, std::int64_t height, std::int64_t width);

// [target, 2x area downsample, 4x area downsample].
std::array<Tensor<float>, kLevels> gt_pyramid(const Tensor<float>& target);

class Dataset {
 public:
  // Loads every pair up front. Missing targets, unreadable files and size
  // mismatches are collected and reported together in one DataError.
  static Dataset load(const std::filesystem::path& root);

  const std::vector<ImagePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  std::vector<ImagePair> pairs_;
};

struct TrainItem {
  std::string id;
  Tensor<float> input;
  std::array<Tensor<float>, kLevels> pyramid;
};

using Batch = std::vector<TrainItem>;

// One epoch of batches: deterministic shuffle from (spec.seed, epoch_seed),
// last partial batch dropped, each item cropped, flipped and pyramided.
class BatchStream {
 public:
  BatchStream(const Dataset& data, const DatasetSpec& spec, int batch, std::uint64_t epoch_seed);

  std::size_t batches_per_epoch() const { return order_.size() / static_cast<std::size_t>(batch_); }
  std::optional<Batch> next();

 private:
  const Dataset* data_;
  DatasetSpec spec_;
  int batch_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace dsea
