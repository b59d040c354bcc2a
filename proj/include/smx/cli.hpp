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

#pragma once

#include <ostream>

namespace smx::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kWeights = 3,
  kImageIo = 4,
};

/// Entry point of the `smx` tool. Subcommands: count, sr, degrade, eval,
/// train, gradcheck.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smx::cli
