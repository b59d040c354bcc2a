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

// Flat "key: value" text. One pair per line; '#' starts a comment; blank
// lines are ignored; keys may not repeat.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "smx/model.hpp"
#include "smx/train.hpp"

namespace smx::config_file {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Throws ConfigSyntaxError with the 1-based line number.
std::vector<Entry> parse(std::string_view text);

struct TrainSettings {
  model::ModelConfig model = model::ModelConfig::tiny(4);
  train::TrainConfig train = train::TrainConfig::desk(4);
};

/// Recognized keys:
///   model:    channels kernel fmb scale expansion variant fusion
///   training: lr beta1 beta2 adam_eps batch patch iters lambda seed
///             checkpoint_every
/// `scale` sets both model and training scale. Unknown keys and unparsable
/// values raise ConfigSyntaxError for their line; cross-field violations
/// raise ConfigError.
TrainSettings train_settings(std::string_view text);

TrainSettings load_train_settings(const std::filesystem::path& path);

}  // namespace smx::config_file
