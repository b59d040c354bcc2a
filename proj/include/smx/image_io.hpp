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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "smx/tensor.hpp"

namespace smx::image_io {

/// Decodes any PNG libpng understands into an 8-bit RGB (1,3,h,w) tensor
/// with values v / 255. Throws ImageIoError.
Tensor4<Real> read_png(const std::filesystem::path& path);

/// Clamps to [0,1], quantizes with round(v * 255) (halves away from zero)
/// and writes an 8-bit RGB PNG. Expects n == 1 and c == 3.
void write_png(const std::filesystem::path& path, const Tensor4<Real>& img);

/// Interleaved RGB bytes as written by write_png.
std::vector<std::uint8_t> quantize(const Tensor4<Real>& img);

/// Inverse of quantize.
Tensor4<Real> dequantize(const std::vector<std::uint8_t>& rgb, std::size_t h, std::size_t w);

}  // namespace smx::image_io
