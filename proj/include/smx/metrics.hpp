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

// Image quality measures on the luma channel.

#pragma once

#include <cstddef>
#include <limits>

#include "smx/tensor.hpp"

namespace smx::metrics {

struct EvalProtocol {
  /// Pixels removed from every side before scoring.
  std::size_t shave = 0;
  /// Convert RGB inputs in [0,1] to BT.601 luma on the 0-255 scale first.
  bool y_only = true;
  double data_range = 255.0;
};

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// Limited-range luma, 16 + 65.481 R + 128.553 G + 24.966 B, for an RGB
/// image in [0,1]. Result has one channel.
Tensor4<double> rgb_to_y(const Tensor4<double>& img);
Tensor4<double> rgb_to_y(const Tensor4<float>& img);

/// Drops `shave` pixels from every border.
Tensor4<double> shave_border(const Tensor4<double>& img, std::size_t shave);

/// PSNR of two images already on the data_range scale. Returns
/// kPsnrIdentical when the shaved regions match exactly. The y_only flag is
/// ignored here; see psnr_rgb.
double psnr(const Tensor4<double>& a, const Tensor4<double>& b, const EvalProtocol& proto);

/// Mean SSIM over all fully-contained 11x11 Gaussian windows, per channel
/// and averaged. ConfigError when the shaved image is smaller than the
/// window.
double ssim(const Tensor4<double>& a, const Tensor4<double>& b, const EvalProtocol& proto);

struct PairScore {
  double psnr = 0.0;
  double ssim = 0.0;
};

/// Scores two RGB images in [0,1]: luma conversion (when proto.y_only) or
/// scaling to 0-255, followed by psnr and ssim.
PairScore evaluate_rgb(const Tensor4<float>& sr, const Tensor4<float>& hr,
                       const EvalProtocol& proto);

}  // namespace smx::metrics
