/* Copyright 2026 The smx Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "smx/config_file.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace smx::config_file {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t as_unsigned(const Entry& e) {
  std::uint64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigSyntaxError(e.line, "'" + e.key + "' expects a non-negative integer, got '" +
                                        e.value + "'");
  }
  return v;
}

double as_real(const Entry& e) {
  std::istringstream in(e.value);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail() || !in.eof()) {
    throw ConfigSyntaxError(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  }
  return v;
}

}  // namespace

std::vector<Entry> parse(std::string_view text) {
  std::vector<Entry> out;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigSyntaxError(line_no, "expected 'key: value', got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, colon)));
    const std::string value(trim(line.substr(colon + 1)));
    if (key.empty()) throw ConfigSyntaxError(line_no, "missing key before ':'");
    if (value.empty()) throw ConfigSyntaxError(line_no, "missing value for '" + key + "'");
    if (!seen.insert(key).second) throw ConfigSyntaxError(line_no, "duplicate key '" + key + "'");
    out.push_back({key, value, line_no});
  }
  return out;
}

TrainSettings train_settings(std::string_view text) {
  TrainSettings s;
  for (const Entry& e : parse(text)) {
    const std::string& k = e.key;
    if (k == "channels") {
      s.model.channels = as_unsigned(e);
    } else if (k == "kernel") {
      s.model.dw_kernel = as_unsigned(e);
    } else if (k == "fmb") {
      s.model.n_fmb = as_unsigned(e);
    } else if (k == "scale") {
      s.model.scale = s.train.scale = as_unsigned(e);
    } else if (k == "expansion") {
      s.model.expansion_extra = as_unsigned(e);
    } else if (k == "variant") {
      try {
        s.model.variant = model::parse_variant(e.value);
        s.model.fusion = model::default_fusion(s.model.variant);
      } catch (const ConfigError& err) {
        throw ConfigSyntaxError(e.line, err.what());
      }
    } else if (k == "fusion") {
      try {
        s.model.fusion = model::parse_fusion(e.value);
      } catch (const ConfigError& err) {
        throw ConfigSyntaxError(e.line, err.what());
      }
    } else if (k == "lr") {
      s.train.lr = as_real(e);
    } else if (k == "beta1") {
      s.train.beta1 = as_real(e);
    } else if (k == "beta2") {
      s.train.beta2 = as_real(e);
    } else if (k == "adam_eps") {
      s.train.adam_eps = as_real(e);
    } else if (k == "batch") {
      s.train.batch = as_unsigned(e);
    } else if (k == "patch") {
      s.train.patch = as_unsigned(e);
    } else if (k == "iters") {
      s.train.iters = as_unsigned(e);
    } else if (k == "lambda") {
      s.train.lambda = as_real(e);
    } else if (k == "seed") {
      s.train.seed = as_unsigned(e);
    } else if (k == "checkpoint_every") {
      s.train.checkpoint_every = as_unsigned(e);
    } else {
      throw ConfigSyntaxError(e.line, "unknown key '" + k + "'");
    }
  }
  s.model.validate();
  s.train.validate();
  return s;
}

TrainSettings load_train_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return train_settings(buf.str());
}

}  // namespace smx::config_file
