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

// Closed-form parameter and multiply-accumulate accounting.
//
// Works from the configuration alone, never from an instantiated tree.
// Conventions:
//   params  conv coeffs + bias; layer norm gamma only
//   MACs    out_ch * in_ch_per_group * k * k * H_out * W_out per conv; bias,
//           normalization, activation, elementwise, resize and shuffle ops
//           are free
// The trunk and first upsampler stage run at LR resolution; a second x2
// stage runs at 2x LR; the output conv runs at HR.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "smx/model.hpp"

namespace smx::complexity {

struct LayerCost {
  std::string name;  // canonical parameter prefix
  std::uint64_t params = 0;
  std::uint64_t macs = 0;
};

struct ComplexityReport {
  std::vector<LayerCost> layers;
  std::uint64_t total_params = 0;
  std::uint64_t total_macs = 0;
  std::size_t lr_h = 0;
  std::size_t lr_w = 0;
  std::size_t hr_h = 0;
  std::size_t hr_w = 0;
};

ComplexityReport analyze(const model::ModelConfig& cfg, std::size_t lr_h, std::size_t lr_w);

std::uint64_t count_params(const model::ModelConfig& cfg);
std::uint64_t count_macs(const model::ModelConfig& cfg, std::size_t lr_h, std::size_t lr_w);

/// LR size for a 1280x720 HR frame at scale s (width rounded up): 640x360,
/// 427x240, 320x180.
std::pair<std::size_t, std::size_t> hd_lr_size(std::size_t scale);

/// "410,643"
std::string with_thousands(std::uint64_t v);
/// Params in thousands with one decimal below 100K, e.g. "35.5K", "411K".
std::string display_params(std::uint64_t params);
/// MACs in units of 1e9 with one decimal, e.g. "27.7G".
std::string display_macs(std::uint64_t macs);

/// Fixed-width table with per-layer rows and totals.
void write_table(std::ostream& os, const model::ModelConfig& cfg, const ComplexityReport& r);

/// One "layer<TAB>name<TAB>params<TAB>macs" record per layer, then a
/// "total" record.
void write_records(std::ostream& os, const ComplexityReport& r);

}  // namespace smx::complexity
