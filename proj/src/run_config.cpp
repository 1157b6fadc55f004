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

#include "run_config.hpp"

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "png.hpp"

namespace dsea {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const ConfigEntry& e, const char* expected) {
  throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key + "' expects " + expected +
                    ", got '" + e.value + "'");
}

template <typename I>
I parse_int(const ConfigEntry& e) {
  I v{};
  const char* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(e, "an integer");
  return v;
}

double parse_double(const ConfigEntry& e) {
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(e, "a number");
  return v;
}

bool parse_bool(const ConfigEntry& e) {
  if (e.value == "1" || e.value == "true") return true;
  if (e.value == "0" || e.value == "false") return false;
  bad_value(e, "true/false or 1/0");
}

struct Line {
  enum Kind { blank, entry, section } kind = blank;
  ConfigEntry kv;
  std::string section_name;
};

Line parse_line(const std::string& raw, int number) {
  std::string s = raw;
  if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  s = trim(s);
  Line line;
  if (s.empty()) return line;
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError("line " + std::to_string(number) + ": unterminated section header");
    const std::string inner = trim(s.substr(1, s.size() - 2));
    if (inner.rfind("arm ", 0) != 0 || trim(inner.substr(4)).empty()) {
      throw ConfigError("line " + std::to_string(number) + ": expected [arm NAME], got '" + s + "'");
    }
    line.kind = Line::section;
    line.section_name = trim(inner.substr(4));
    return line;
  }
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
  line.kind = Line::entry;
  line.kv = {trim(s.substr(0, eq)), trim(s.substr(eq + 1)), number};
  if (line.kv.key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
  return line;
}

std::string read_text(const std::filesystem::path& path) {
  Bytes bytes;
  try {
    bytes = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

const std::vector<ConfigKey>& run_config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"base_width", "channels at the finest level (multiple of 4 and of dct_groups)"},
      {"levels", "encoder/decoder levels (must be 3)"},
      {"blocks_per_level", "units per encoder level; the decoder mirrors it"},
      {"pooling_ratio", "DC extraction window as a fraction of the extent, in (0,1]"},
      {"dct_groups", "number of DCT frequency groups in the SFM block"},
      {"enable_dfesa", "include the dual-frequency attention block (true/false)"},
      {"enable_sfm", "include the spatial and frequency modulator (true/false)"},
      {"plain_attention", "attention block without its frequency factors (true/false)"},
      {"seed", "seed for parameter init and for the data stream"},
      {"patch", "training crop size, multiple of 4"},
      {"flips", "random horizontal and vertical flips (true/false)"},
      {"lr_max", "initial learning rate"},
      {"lr_min", "final learning rate"},
      {"lambda1", "weight of the spatial L1 loss"},
      {"lambda2", "weight of the spectral L1 loss"},
      {"steps", "optimizer steps"},
      {"batch", "images per step"},
      {"checkpoint_every", "write an intermediate checkpoint every N steps (0 = only at the end)"},
  };
  return keys;
}

void apply_config_entry(TrainConfig& cfg, const ConfigEntry& e) {
  const std::string& k = e.key;
  if (k == "base_width") cfg.model.base_width = parse_int<int>(e);
  else if (k == "levels") cfg.model.levels = parse_int<int>(e);
  else if (k == "blocks_per_level") cfg.model.blocks_per_level = parse_int<int>(e);
  else if (k == "pooling_ratio") cfg.model.pooling_ratio = parse_double(e);
  else if (k == "dct_groups") cfg.model.dct_groups = parse_int<int>(e);
  else if (k == "enable_dfesa") cfg.model.enable_dfesa = parse_bool(e);
  else if (k == "enable_sfm") cfg.model.enable_sfm = parse_bool(e);
  else if (k == "plain_attention") cfg.model.plain_attention = parse_bool(e);
  else if (k == "seed") cfg.model.seed = cfg.data.seed = parse_int<std::uint64_t>(e);
  else if (k == "patch") cfg.data.patch = parse_int<int>(e);
  else if (k == "flips") cfg.data.flips = parse_bool(e);
  else if (k == "lr_max") cfg.lr.lr_max = parse_double(e);
  else if (k == "lr_min") cfg.lr.lr_min = parse_double(e);
  else if (k == "lambda1") cfg.loss.lambda1 = parse_double(e);
  else if (k == "lambda2") cfg.loss.lambda2 = parse_double(e);
  else if (k == "steps") cfg.steps = parse_int<int>(e);
  else if (k == "batch") cfg.batch = parse_int<int>(e);
  else if (k == "checkpoint_every") cfg.checkpoint_every = parse_int<int>(e);
  else throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + k + "'");
}

TrainConfig parse_run_config(const std::string& text, const TrainConfig& base) {
  TrainConfig cfg = base;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    const Line line = parse_line(raw, ++number);
    if (line.kind == Line::section) {
      throw ConfigError("line " + std::to_string(number) + ": sections are only allowed in plan files");
    }
    if (line.kind == Line::entry) apply_config_entry(cfg, line.kv);
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_run_config(const TrainConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  const auto b = [](bool v) { return v ? "true" : "false"; };
  os << "base_width = " << cfg.model.base_width << "\n"
     << "levels = " << cfg.model.levels << "\n"
     << "blocks_per_level = " << cfg.model.blocks_per_level << "\n"
     << "pooling_ratio = " << cfg.model.pooling_ratio << "\n"
     << "dct_groups = " << cfg.model.dct_groups << "\n"
     << "enable_dfesa = " << b(cfg.model.enable_dfesa) << "\n"
     << "enable_sfm = " << b(cfg.model.enable_sfm) << "\n"
     << "plain_attention = " << b(cfg.model.plain_attention) << "\n"
     << "seed = " << cfg.model.seed << "\n"
     << "patch = " << cfg.data.patch << "\n"
     << "flips = " << b(cfg.data.flips) << "\n"
     << "lr_max = " << cfg.lr.lr_max << "\n"
     << "lr_min = " << cfg.lr.lr_min << "\n"
     << "lambda1 = " << cfg.loss.lambda1 << "\n"
     << "lambda2 = " << cfg.loss.lambda2 << "\n"
     << "steps = " << cfg.steps << "\n"
     << "batch = " << cfg.batch << "\n"
     << "checkpoint_every = " << cfg.checkpoint_every << "\n";
  return os.str();
}

ExperimentPlan parse_plan(const std::string& text) {
  ExperimentPlan plan;
  std::vector<std::pair<std::string, std::vector<ConfigEntry>>> sections;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    Line line = parse_line(raw, ++number);
    if (line.kind == Line::section) {
      for (const auto& s : sections) {
        if (s.first == line.section_name) throw ConfigError("duplicate arm '" + line.section_name + "'");
      }
      sections.emplace_back(line.section_name, std::vector<ConfigEntry>{});
    } else if (line.kind == Line::entry) {
      if (sections.empty()) {
        apply_config_entry(plan.base, line.kv);
      } else {
        if (line.kv.key == "seed") {
          throw ConfigError("line " + std::to_string(number) + ": arms share the plan seed; set it at the top");
        }
        sections.back().second.push_back(line.kv);
      }
    }
  }
  if (sections.empty()) throw ConfigError("plan declares no [arm NAME] sections");
  for (auto& [name, entries] : sections) {
    ArmSpec arm{name, plan.base};
    for (const auto& e : entries) apply_config_entry(arm.config, e);
    try {
      arm.config.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("arm '" + name + "': " + e.what());
    }
    plan.arms.push_back(std::move(arm));
  }
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  try {
    return parse_plan(read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace dsea
