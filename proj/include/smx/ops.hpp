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

// Neural operators with their vector-Jacobian products.
//
// Every kernel is a pure function. The heavy ones (convolution, resampling,
// normalization) are parallelized with OpenMP over independent outputs, so
// each output element is reduced by exactly one thread in a fixed order and
// results do not depend on the thread count. Serial reference versions of
// the convolution kernels live in smx/reference.hpp.

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "smx/tensor.hpp"

namespace smx::ops {

/// Convolution weights viewed in place. coeffs is (out_ch, in_ch/groups, k, k)
/// with k odd; bias is empty or holds out_ch values. Stride 1, zero padding
/// of (k-1)/2, so spatial size is preserved.
template <typename T>
struct ConvWeight {
  const Tensor4<T>& coeffs;
  std::span<const T> bias = {};
  std::size_t groups = 1;

  std::size_t out_ch() const noexcept { return coeffs.n(); }
  std::size_t in_per_group() const noexcept { return coeffs.c(); }
  std::size_t k() const noexcept { return coeffs.h(); }
};

template <typename T>
struct ConvGrads {
  Tensor4<T> input;
  Tensor4<T> coeffs;
  std::vector<T> bias;
};

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ConvWeight<T>& w);

/// Gradients of conv2d w.r.t. input, coefficients and bias (bias grads are
/// returned even when the forward ran without bias).
template <typename T>
ConvGrads<T> conv2d_vjp(const Tensor4<T>& x, const ConvWeight<T>& w, const Tensor4<T>& dy);

/// conv2d restricted to one filter per channel and k in {3,5,...,13}.
template <typename T>
Tensor4<T> depthwise_conv2d(const Tensor4<T>& x, const ConvWeight<T>& w);

/// Throws ShapeError/ConfigError if (x, w) is not a valid conv2d pair.
template <typename T>
void check_conv(const Shape4& x, const ConvWeight<T>& w);

template <typename T>
std::pair<Tensor4<T>, Tensor4<T>> channel_split(const Tensor4<T>& x);

template <typename T>
Tensor4<T> channel_concat(const Tensor4<T>& a, const Tensor4<T>& b);

/// Output channel j takes input channel (j % g) * (c / g) + j / g.
template <typename T>
Tensor4<T> channel_shuffle(const Tensor4<T>& x, std::size_t groups);

template <typename T>
struct NormWeight {
  std::span<const T> gamma;
  T eps = T(1e-6);
};

template <typename T>
struct NormGrads {
  Tensor4<T> input;
  std::vector<T> gamma;
};

/// Per-pixel normalization across channels (population variance), scale only.
template <typename T>
Tensor4<T> layer_norm_channels(const Tensor4<T>& x, const NormWeight<T>& w);

template <typename T>
NormGrads<T> layer_norm_vjp(const Tensor4<T>& x, const NormWeight<T>& w, const Tensor4<T>& dy);

template <typename T>
Tensor4<T> silu(const Tensor4<T>& x);

template <typename T>
Tensor4<T> silu_vjp(const Tensor4<T>& x, const Tensor4<T>& dy);

template <typename T>
Tensor4<T> pixel_shuffle(const Tensor4<T>& x, std::size_t r);

template <typename T>
Tensor4<T> pixel_unshuffle(const Tensor4<T>& x, std::size_t r);

/// Half-pixel-center bilinear upscale by an integer factor in {2,3,4}.
template <typename T>
Tensor4<T> bilinear_resize(const Tensor4<T>& x, std::size_t s);

template <typename T>
Tensor4<T> bilinear_resize_vjp(const Shape4& input, std::size_t s, const Tensor4<T>& dy);

/// Cubic (a = -0.5) resampling with antialiasing when scale < 1. Output
/// extent per axis is round(extent * scale), at least 1.
template <typename T>
Tensor4<T> bicubic_resize(const Tensor4<T>& x, double scale);

template <typename T>
Tensor4<T> bicubic_resize_vjp(const Shape4& input, double scale, const Tensor4<T>& dy);

/// Cubic convolution kernel with a = -0.5.
double cubic_kernel(double t) noexcept;

/// Output extent used by bicubic_resize for one axis.
std::size_t resized_extent(std::size_t extent, double scale);

}  // namespace smx::ops
