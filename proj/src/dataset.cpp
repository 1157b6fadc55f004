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

#include "dataset.hpp"

#include <algorithm>
#include <sstream>

#include "png.hpp"

namespace dsea {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) { return rng() % n; }

}  // namespace

Tensor<float> crop(const Tensor<float>& img, std::int64_t top, std::int64_t left,
                   std::int64_t height, std::int64_t width) {
  const std::int64_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
  if (top < 0 || left < 0 || top + height > h || left + width > w) {
    throw ParameterError("crop window outside image " + shape_str(img.shape()));
  }
  std::vector<float> out(static_cast<std::size_t>(c * height * width));
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t y = 0; y < height; ++y)
      std::copy_n(img.data().begin() + (ch * h + top + y) * w + left, width,
                  out.begin() + (ch * height + y) * width);
  return Tensor<float>::from_values({c, height, width}, std::move(out));
}

Tensor<float> pad_edge(const Tensor<float>& img, std::int64_t height, std::int64_t width) {
  const std::int64_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
  if (height < h || width < w) throw ParameterError("pad_edge: target smaller than image");
  std::vector<float> out(static_cast<std::size_t>(c * height * width));
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t y = 0; y < height; ++y)
      for (std::int64_t x = 0; x < width; ++x)
        out[(ch * height + y) * width + x] =
            img.data()[(ch * h + std::min(y, h - 1)) * w + std::min(x, w - 1)];
  return Tensor<float>::from_values({c, height, width}, std::move(out));
}

Tensor<float> flip_horizontal(const Tensor<float>& img) {
  const std::int64_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
  std::vector<float> out(img.numel());
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t y = 0; y < h; ++y)
      for (std::int64_t x = 0; x < w; ++x)
        out[(ch * h + y) * w + x] = img.data()[(ch * h + y) * w + (w - 1 - x)];
  return Tensor<float>::from_values(img.shape(), std::move(out));
}

Tensor<float> flip_vertical(const Tensor<float>& img) {
  const std::int64_t c = img.dim(0), h = img.dim(1), w = img.dim(2);
  std::vector<float> out(img.numel());
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t y = 0; y < h; ++y)
      std::copy_n(img.data().begin() + (ch * h + (h - 1 - y)) * w, w, out.begin() + (ch * h + y) * w);
  return Tensor<float>::from_values(img.shape(), std::move(out));
}

ImagePair sample_patch(const ImagePair& pair, int patch, Rng& rng) {
  const std::int64_t h = pair.input.dim(1), w = pair.input.dim(2);
  if (patch < 1 || patch > h || patch > w) {
    throw ParameterError("patch " + std::to_string(patch) + " does not fit image " + pair.id +
                         " of " + std::to_string(h) + "x" + std::to_string(w));
  }
  const auto top = static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(h - patch + 1)));
  const auto left = static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(w - patch + 1)));
  return {crop(pair.input, top, left, patch, patch), crop(pair.target, top, left, patch, patch),
          pair.id};
}

ImagePair augment_flip(const ImagePair& pair, Rng& rng) {
  const bool horizontal = rng() & 1;
  const bool vertical = rng() & 1;
  ImagePair out = pair;
  if (horizontal) {
    out.input = flip_horizontal(out.input);
    out.target = flip_horizontal(out.target);
  }
  if (vertical) {
    out.input = flip_vertical(out.input);
    out.target = flip_vertical(out.target);
  }
  return out;
}

std::array<Tensor<float>, kLevels> gt_pyramid(const Tensor<float>& target) {
  if (target.rank() != 3 || target.dim(1) % 4 != 0 || target.dim(2) % 4 != 0) {
    throw ShapeError("gt_pyramid: extent must be divisible by 4, got " + shape_str(target.shape()));
  }
  std::array<Tensor<float>, kLevels> out;
  out[0] = target;
  for (int s = 1; s < kLevels; ++s) out[s] = area_downsample2(out[s - 1]);
  return out;
}

Dataset Dataset::load(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  const fs::path input_dir = root / "input";
  const fs::path target_dir = root / "target";
  if (!fs::is_directory(input_dir)) throw DataError("missing directory " + input_dir.string());
  if (!fs::is_directory(target_dir)) throw DataError("missing directory " + target_dir.string());

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(input_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) throw DataError("no .png files in " + input_dir.string());

  Dataset ds;
  std::vector<std::string> problems;
  for (const auto& in_path : inputs) {
    const fs::path tgt_path = target_dir / in_path.filename();
    if (!fs::exists(tgt_path)) {
      problems.push_back("missing target " + tgt_path.string());
      continue;
    }
    try {
      ImagePair pair{read_png(in_path), read_png(tgt_path), in_path.filename().string()};
      if (pair.input.shape() != pair.target.shape()) {
        problems.push_back("size mismatch between " + in_path.string() + " and " + tgt_path.string());
        continue;
      }
      ds.pairs_.push_back(std::move(pair));
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::ostringstream os;
    os << problems.size() << " dataset problem(s):";
    for (const auto& p : problems) os << "\n  " << p;
    throw DataError(os.str());
  }
  return ds;
}

BatchStream::BatchStream(const Dataset& data, const DatasetSpec& spec, int batch,
                         std::uint64_t epoch_seed)
    : data_(&data), spec_(spec), batch_(batch), rng_(mix_seed(spec.seed, epoch_seed)) {
  if (batch < 1) throw ParameterError("batch size must be >= 1");
  if (data.size() == 0) throw DataError("dataset is empty");
  if (spec.patch % 4 != 0) throw ParameterError("patch must be divisible by 4");
  order_.resize(data.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  for (std::size_t i = order_.size(); i > 1; --i) {
    std::swap(order_[i - 1], order_[uniform_below(rng_, i)]);
  }
}

std::optional<Batch> BatchStream::next() {
  if (cursor_ + static_cast<std::size_t>(batch_) > order_.size()) return std::nullopt;
  Batch batch;
  for (int b = 0; b < batch_; ++b) {
    const ImagePair& src = data_->pairs()[order_[cursor_++]];
    ImagePair item = sample_patch(src, spec_.patch, rng_);
    if (spec_.flips) item = augment_flip(item, rng_);
    batch.push_back({item.id, item.input, gt_pyramid(item.target)});
  }
  return batch;
}

}  // namespace dsea
