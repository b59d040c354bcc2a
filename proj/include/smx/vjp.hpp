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

// Uniform forward/backward entry points keyed by operator id.
//
// Input conventions (in order):
//   add, sub, mul            {a, b}
//   conv2d, depthwise_conv2d {x, coeffs, bias?}  bias as (out,1,1,1)
//   channel_split            {x}; output and cotangent are the two halves
//                            concatenated back along channels
//   channel_concat           {a, b}
//   channel_shuffle          {x}, attrs.groups
//   layer_norm               {x, gamma}  gamma as (C,1,1,1), attrs.eps
//   silu                     {x}
//   pixel_shuffle/unshuffle  {x}, attrs.factor
//   bilinear_resize          {x}, attrs.factor
//   bicubic_resize           {x}, attrs.scale
//   l1_loss, frequency_loss  {sr, gt}; output is a (1,1,1,1) scalar

#pragma once

#include <span>
#include <vector>

#include "smx/tensor.hpp"

namespace smx::ops {

enum class OpKind : int {
  add,
  sub,
  mul,
  conv2d,
  depthwise_conv2d,
  channel_split,
  channel_concat,
  channel_shuffle,
  layer_norm,
  silu,
  pixel_shuffle,
  pixel_unshuffle,
  bilinear_resize,
  bicubic_resize,
  l1_loss,
  frequency_loss,
};

inline constexpr OpKind kAllOps[] = {
    OpKind::add,           OpKind::sub,           OpKind::mul,
    OpKind::conv2d,        OpKind::depthwise_conv2d, OpKind::channel_split,
    OpKind::channel_concat, OpKind::channel_shuffle, OpKind::layer_norm,
    OpKind::silu,          OpKind::pixel_shuffle, OpKind::pixel_unshuffle,
    OpKind::bilinear_resize, OpKind::bicubic_resize, OpKind::l1_loss,
    OpKind::frequency_loss,
};

const char* op_name(OpKind op);

struct OpAttrs {
  std::size_t groups = 1;
  std::size_t factor = 2;
  double scale = 1.0;
  double eps = 1e-6;
};

template <typename T>
Tensor4<T> forward(OpKind op, std::span<const Tensor4<T>> inputs, const OpAttrs& attrs = {});

/// Cotangent of every input, in input order. Unknown ids raise ConfigError.
template <typename T>
std::vector<Tensor4<T>> vjp(OpKind op, std::span<const Tensor4<T>> inputs, const OpAttrs& attrs,
                            const Tensor4<T>& cotangent);

}  // namespace smx::ops
