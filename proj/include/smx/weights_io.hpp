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

// Parameter initialization and the weights file format.
//
// Layout (all integers little-endian):
//
//   "SMXW"                       4 bytes
//   format version               u16
//   D, k, n_fmb, s, C', variant, fusion     u16 each
//   per tensor, in canonical order:
//     name length u16, name bytes, rank u8, dims u32 x rank,
//     payload f32 x prod(dims)
//
// The record list must match the layout implied by the header exactly and
// must end at end of file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "smx/model.hpp"

namespace smx::weights_io {

inline constexpr char kMagic[4] = {'S', 'M', 'X', 'W'};
inline constexpr std::uint16_t kFormatVersion = 1;

/// Fan-in uniform coefficients in +-sqrt(6 / fan_in), zero biases, unit
/// gammas. Each tensor draws from its own stream seeded by (seed, hash of
/// its canonical name), so adding or removing other layers never changes it.
ParamTree<Real> init_params(const model::ModelConfig& cfg, std::uint64_t seed);

template <typename T>
std::vector<std::uint8_t> encode(const ParamTree<T>& tree, const model::ModelConfig& cfg);

struct Loaded {
  ParamTree<Real> tree;
  model::ModelConfig cfg;
};

Loaded decode(std::span<const std::uint8_t> bytes);

template <typename T>
void save(const ParamTree<T>& tree, const model::ModelConfig& cfg, const std::filesystem::path& path);

Loaded load(const std::filesystem::path& path);

/// As load, but also requires the header to describe `expected`.
Loaded load(const std::filesystem::path& path, const model::ModelConfig& expected);

/// FNV-1a 64 of a byte buffer.
std::uint64_t checksum(std::span<const std::uint8_t> bytes);

std::uint64_t file_checksum(const std::filesystem::path& path);

}  // namespace smx::weights_io
