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

// Network configuration and the forward pass.
//
//   sr = bilinear(lr, s) + conv_out(upsample(trunk(conv_in(lr))))
//
// The trunk is n_fmb blocks. Each block applies two layers of the variant's
// kind and then an optional fusion stage:
//
//   full / cdc          layer = shuffle mixer (projection, depth-wise, projection)
//   css                 layer = projection, depth-wise
//   convmixer_baseline  layer = depth-wise + skip, norm, 1x1 D->2D->D MLP + skip
//
// `full` is cdc with the s_fmbconv fusion. The ablation variants default to
// no fusion, which gives a plain stack of 2 * n_fmb layers.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smx/autodiff.hpp"
#include "smx/param_tree.hpp"
#include "smx/tensor.hpp"

namespace smx::model {

enum class Variant : std::uint16_t { full = 0, cdc = 1, css = 2, convmixer_baseline = 3 };

enum class Fusion : std::uint16_t {
  none = 0,
  conv = 1,
  s_conv = 2,
  c_conv = 3,
  s_resblock = 4,
  s_fmbconv = 5,
};

std::string_view to_string(Variant v);
std::string_view to_string(Fusion f);
Variant parse_variant(std::string_view s);
Fusion parse_fusion(std::string_view s);

/// Default fusion for a variant: s_fmbconv for full, none otherwise.
Fusion default_fusion(Variant v);

struct ModelConfig {
  std::size_t channels = 64;
  std::size_t dw_kernel = 7;
  std::size_t n_fmb = 5;
  std::size_t scale = 4;
  std::size_t expansion_extra = 16;
  Variant variant = Variant::full;
  Fusion fusion = Fusion::s_fmbconv;

  /// 64 channels, 7x7 depth-wise kernels.
  static ModelConfig standard(std::size_t scale);
  /// 32 channels, 3x3 depth-wise kernels.
  static ModelConfig tiny(std::size_t scale);
  /// Ablation model on the tiny backbone at x4.
  static ModelConfig ablation(Variant v, Fusion f);

  /// Throws ConfigError when any invariant is violated.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class ParamRole { coeffs, bias, gamma };

struct ParamSpec {
  std::string name;
  std::size_t rank;
  Shape4 shape;
  ParamRole role;
  /// in_ch_per_group * k * k for coeffs; 0 otherwise.
  std::size_t fan_in;
};

/// Canonical parameter list (names, shapes, roles) in serialization order.
std::vector<ParamSpec> layout(const ModelConfig& cfg);

/// Name segment of a variant's trunk layers: "mixer", "css" or "convmixer".
std::string layer_kind(Variant v);

/// Parameters for cfg, initialized deterministically from seed.
ParamTree<Real> build(const ModelConfig& cfg, std::uint64_t seed);

/// Checks that tree has exactly cfg's layout.
template <typename T>
void check_tree(const ParamTree<T>& tree, const ModelConfig& cfg);

template <typename T>
Tensor4<T> forward(const ParamTree<T>& tree, const ModelConfig& cfg, const Tensor4<T>& lr);

/// Records the forward pass of lr (a constant on the tape) and returns the
/// SR node.
template <typename T>
typename Tape<T>::Var forward(Tape<T>& tape, const ModelConfig& cfg, typename Tape<T>::Var lr);

// Building blocks, addressed by the canonical prefix of their parameters,
// e.g. "fmb.0.mixer.1.proj_in", "fmb.2", "upsampler".

template <typename T>
Tensor4<T> channel_projection(const ParamTree<T>& tree, const std::string& prefix,
                              const Tensor4<T>& x);

template <typename T>
Tensor4<T> shuffle_mixer_layer(const ParamTree<T>& tree, const std::string& prefix,
                               const Tensor4<T>& x);

template <typename T>
Tensor4<T> feature_mixing_block(const ParamTree<T>& tree, const ModelConfig& cfg,
                                const std::string& prefix, const Tensor4<T>& x);

template <typename T>
Tensor4<T> upsampler(const ParamTree<T>& tree, std::size_t scale, const Tensor4<T>& x);

}  // namespace smx::model
