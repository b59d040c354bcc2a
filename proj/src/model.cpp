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

#include "smx/model.hpp"

#include <array>
#include <limits>

#include "smx/weights_io.hpp"

namespace smx::model {
namespace {

constexpr std::array<std::string_view, 4> kVariantNames = {"full", "cdc", "css",
                                                           "convmixer_baseline"};
constexpr std::array<std::string_view, 6> kFusionNames = {"none",   "conv",       "s_conv",
                                                          "c_conv", "s_resblock", "s_fmbconv"};

void add_conv(std::vector<ParamSpec>& out, const std::string& name, std::size_t out_ch,
              std::size_t in_per_group, std::size_t k) {
  out.push_back({name + ".coeffs", 4, Shape4{out_ch, in_per_group, k, k}, ParamRole::coeffs,
                 in_per_group * k * k});
  out.push_back({name + ".bias", 1, Shape4{out_ch, 1, 1, 1}, ParamRole::bias, 0});
}

void add_norm(std::vector<ParamSpec>& out, const std::string& name, std::size_t c) {
  out.push_back({name + ".gamma", 1, Shape4{c, 1, 1, 1}, ParamRole::gamma, 0});
}

void add_projection(std::vector<ParamSpec>& out, const std::string& name, std::size_t d) {
  add_norm(out, name + ".norm", d);
  add_conv(out, name + ".w0", d, d / 2, 1);
  add_conv(out, name + ".w1", d / 2, d, 1);
}

// Shared network description, evaluated by either executor.

template <class Ex>
using VarOf = typename Ex::Var;

template <class Ex>
VarOf<Ex> projection(Ex& ex, const VarOf<Ex>& x, const std::string& p) {
  auto [first, second] = ex.split(ex.norm(x, p + ".norm"));
  auto mixed = ex.conv(ex.silu(ex.conv(first, p + ".w0")), p + ".w1");
  return ex.add(ex.shuffle(ex.concat(mixed, second), 2), x);
}

template <class Ex>
VarOf<Ex> mixer_layer(Ex& ex, const VarOf<Ex>& x, const std::string& p) {
  auto y = projection(ex, x, p + ".proj_in");
  y = ex.conv(y, p + ".dw");
  return projection(ex, y, p + ".proj_out");
}

template <class Ex>
VarOf<Ex> css_layer(Ex& ex, const VarOf<Ex>& x, const std::string& p) {
  return ex.conv(projection(ex, x, p + ".proj"), p + ".dw");
}

template <class Ex>
VarOf<Ex> convmixer_layer(Ex& ex, const VarOf<Ex>& x, const std::string& p) {
  auto y = ex.add(ex.conv(x, p + ".dw"), x);
  auto h = ex.conv(ex.silu(ex.conv(ex.norm(y, p + ".norm"), p + ".mlp0")), p + ".mlp1");
  return ex.add(h, y);
}

template <class Ex>
VarOf<Ex> trunk_layer(Ex& ex, Variant v, const VarOf<Ex>& x, const std::string& p) {
  switch (v) {
    case Variant::full:
    case Variant::cdc: return mixer_layer(ex, x, p);
    case Variant::css: return css_layer(ex, x, p);
    case Variant::convmixer_baseline: return convmixer_layer(ex, x, p);
  }
  throw ConfigError("unknown variant");
}

template <class Ex>
VarOf<Ex> block(Ex& ex, const ModelConfig& cfg, const VarOf<Ex>& x, const std::string& p) {
  const std::string kind = p + "." + layer_kind(cfg.variant);
  auto m = trunk_layer(ex, cfg.variant, trunk_layer(ex, cfg.variant, x, kind + ".0"), kind + ".1");
  const std::string f = p + ".fuse";
  switch (cfg.fusion) {
    case Fusion::none: return m;
    case Fusion::conv: return ex.conv(m, f + ".conv");
    case Fusion::s_conv: return ex.conv(ex.add(x, m), f + ".conv");
    case Fusion::c_conv: return ex.conv(ex.concat(x, m), f + ".conv");
    case Fusion::s_resblock: {
      auto z = ex.add(x, m);
      return ex.add(ex.conv(ex.silu(ex.conv(z, f + ".conv0")), f + ".conv1"), z);
    }
    case Fusion::s_fmbconv: {
      auto z = ex.add(x, m);
      return ex.add(ex.conv(ex.silu(ex.conv(z, f + ".expand")), f + ".reduce"), z);
    }
  }
  throw ConfigError("unknown fusion");
}

template <class Ex>
VarOf<Ex> upsample(Ex& ex, std::size_t s, const VarOf<Ex>& x) {
  switch (s) {
    case 2:
    case 3: return ex.pixel_shuffle(ex.conv(x, "upsampler.0.conv"), s);
    case 4: {
      auto y = ex.pixel_shuffle(ex.conv(x, "upsampler.0.conv"), 2);
      return ex.pixel_shuffle(ex.conv(y, "upsampler.1.conv"), 2);
    }
    default: throw ConfigError("upsampler: scale must be 2, 3 or 4, got " + std::to_string(s));
  }
}

template <class Ex>
VarOf<Ex> network(Ex& ex, const ModelConfig& cfg, const VarOf<Ex>& lr) {
  auto f = ex.conv(lr, "head.conv_in");
  for (std::size_t i = 0; i < cfg.n_fmb; ++i) f = block(ex, cfg, f, "fmb." + std::to_string(i));
  auto residual = ex.conv(upsample(ex, cfg.scale, f), "tail.conv_out");
  return ex.add(ex.bilinear(lr, cfg.scale), residual);
}

void check_input(const Shape4& lr) {
  if (lr.c != 3) throw ShapeError("forward: input must have 3 channels, got " + lr.str());
}

}  // namespace

std::string_view to_string(Variant v) {
  const auto i = static_cast<std::size_t>(v);
  if (i >= kVariantNames.size()) throw ConfigError("unknown variant code " + std::to_string(i));
  return kVariantNames[i];
}

std::string_view to_string(Fusion f) {
  const auto i = static_cast<std::size_t>(f);
  if (i >= kFusionNames.size()) throw ConfigError("unknown fusion code " + std::to_string(i));
  return kFusionNames[i];
}

Variant parse_variant(std::string_view s) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (kVariantNames[i] == s) return static_cast<Variant>(i);
  }
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

Fusion parse_fusion(std::string_view s) {
  for (std::size_t i = 0; i < kFusionNames.size(); ++i) {
    if (kFusionNames[i] == s) return static_cast<Fusion>(i);
  }
  throw ConfigError("unknown fusion '" + std::string(s) + "'");
}

Fusion default_fusion(Variant v) { return v == Variant::full ? Fusion::s_fmbconv : Fusion::none; }

ModelConfig ModelConfig::standard(std::size_t scale) {
  ModelConfig cfg;
  cfg.scale = scale;
  return cfg;
}

ModelConfig ModelConfig::tiny(std::size_t scale) {
  ModelConfig cfg;
  cfg.channels = 32;
  cfg.dw_kernel = 3;
  cfg.scale = scale;
  return cfg;
}

ModelConfig ModelConfig::ablation(Variant v, Fusion f) {
  ModelConfig cfg = tiny(4);
  cfg.variant = v;
  cfg.fusion = f;
  return cfg;
}

void ModelConfig::validate() const {
  (void)to_string(variant);
  (void)to_string(fusion);
  if (channels < 2 || channels % 2 != 0) {
    throw ConfigError("channels must be even and >= 2, got " + std::to_string(channels));
  }
  if (dw_kernel < 3 || dw_kernel > 13 || dw_kernel % 2 == 0) {
    throw ConfigError("depth-wise kernel must be one of 3,5,7,9,11,13, got " +
                      std::to_string(dw_kernel));
  }
  if (n_fmb < 1) throw ConfigError("n_fmb must be >= 1");
  if (scale < 2 || scale > 4) {
    throw ConfigError("scale must be 2, 3 or 4, got " + std::to_string(scale));
  }
  constexpr std::size_t kMax = std::numeric_limits<std::uint16_t>::max();
  if (channels > kMax || n_fmb > kMax || expansion_extra > kMax) {
    throw ConfigError("configuration values must fit in 16 bits");
  }
  if (variant == Variant::full && fusion != Fusion::s_fmbconv) {
    throw ConfigError("variant 'full' requires fusion 's_fmbconv', got '" +
                      std::string(to_string(fusion)) + "'");
  }
}

std::string layer_kind(Variant v) {
  switch (v) {
    case Variant::full:
    case Variant::cdc: return "mixer";
    case Variant::css: return "css";
    case Variant::convmixer_baseline: return "convmixer";
  }
  throw ConfigError("unknown variant");
}

std::vector<ParamSpec> layout(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.channels;
  const std::size_t k = cfg.dw_kernel;
  std::vector<ParamSpec> out;
  add_conv(out, "head.conv_in", d, 3, 3);
  for (std::size_t i = 0; i < cfg.n_fmb; ++i) {
    const std::string p = "fmb." + std::to_string(i);
    for (std::size_t j = 0; j < 2; ++j) {
      const std::string lp = p + "." + layer_kind(cfg.variant) + "." + std::to_string(j);
      switch (cfg.variant) {
        case Variant::full:
        case Variant::cdc:
          add_projection(out, lp + ".proj_in", d);
          add_conv(out, lp + ".dw", d, 1, k);
          add_projection(out, lp + ".proj_out", d);
          break;
        case Variant::css:
          add_projection(out, lp + ".proj", d);
          add_conv(out, lp + ".dw", d, 1, k);
          break;
        case Variant::convmixer_baseline:
          add_conv(out, lp + ".dw", d, 1, k);
          add_norm(out, lp + ".norm", d);
          add_conv(out, lp + ".mlp0", 2 * d, d, 1);
          add_conv(out, lp + ".mlp1", d, 2 * d, 1);
          break;
      }
    }
    const std::string f = p + ".fuse";
    switch (cfg.fusion) {
      case Fusion::none: break;
      case Fusion::conv:
      case Fusion::s_conv: add_conv(out, f + ".conv", d, d, 3); break;
      case Fusion::c_conv: add_conv(out, f + ".conv", d, 2 * d, 3); break;
      case Fusion::s_resblock:
        add_conv(out, f + ".conv0", d, d, 3);
        add_conv(out, f + ".conv1", d, d, 3);
        break;
      case Fusion::s_fmbconv:
        add_conv(out, f + ".expand", d + cfg.expansion_extra, d, 3);
        add_conv(out, f + ".reduce", d, d + cfg.expansion_extra, 1);
        break;
    }
  }
  if (cfg.scale == 4) {
    add_conv(out, "upsampler.0.conv", 4 * d, d, 1);
    add_conv(out, "upsampler.1.conv", 4 * d, d, 1);
  } else {
    add_conv(out, "upsampler.0.conv", cfg.scale * cfg.scale * d, d, 1);
  }
  add_conv(out, "tail.conv_out", 3, d, 3);
  return out;
}

ParamTree<Real> build(const ModelConfig& cfg, std::uint64_t seed) {
  return weights_io::init_params(cfg, seed);
}

template <typename T>
void check_tree(const ParamTree<T>& tree, const ModelConfig& cfg) {
  const auto specs = layout(cfg);
  if (specs.size() != tree.size()) {
    throw ShapeError("parameter tree has " + std::to_string(tree.size()) +
                     " entries, configuration expects " + std::to_string(specs.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (tree[i].name != specs[i].name || !(tree[i].value.shape() == specs[i].shape)) {
      throw ShapeError("parameter " + std::to_string(i) + " is '" + tree[i].name + "' " +
                       tree[i].value.shape().str() + ", expected '" + specs[i].name + "' " +
                       specs[i].shape.str());
    }
  }
}

template <typename T>
Tensor4<T> forward(const ParamTree<T>& tree, const ModelConfig& cfg, const Tensor4<T>& lr) {
  check_tree(tree, cfg);
  check_input(lr.shape());
  Eager<T> ex(tree);
  return network(ex, cfg, lr);
}

template <typename T>
typename Tape<T>::Var forward(Tape<T>& tape, const ModelConfig& cfg, typename Tape<T>::Var lr) {
  cfg.validate();
  check_input(tape.value(lr).shape());
  return network(tape, cfg, lr);
}

template <typename T>
Tensor4<T> channel_projection(const ParamTree<T>& tree, const std::string& prefix,
                              const Tensor4<T>& x) {
  Eager<T> ex(tree);
  return projection(ex, x, prefix);
}

template <typename T>
Tensor4<T> shuffle_mixer_layer(const ParamTree<T>& tree, const std::string& prefix,
                               const Tensor4<T>& x) {
  Eager<T> ex(tree);
  return mixer_layer(ex, x, prefix);
}

template <typename T>
Tensor4<T> feature_mixing_block(const ParamTree<T>& tree, const ModelConfig& cfg,
                                const std::string& prefix, const Tensor4<T>& x) {
  cfg.validate();
  Eager<T> ex(tree);
  return block(ex, cfg, x, prefix);
}

template <typename T>
Tensor4<T> upsampler(const ParamTree<T>& tree, std::size_t scale, const Tensor4<T>& x) {
  Eager<T> ex(tree);
  return upsample(ex, scale, x);
}

#define SMX_INSTANTIATE(T)                                                                      \
  template void check_tree<T>(const ParamTree<T>&, const ModelConfig&);                         \
  template Tensor4<T> forward<T>(const ParamTree<T>&, const ModelConfig&, const Tensor4<T>&);   \
  template Tape<T>::Var forward<T>(Tape<T>&, const ModelConfig&, Tape<T>::Var);                 \
  template Tensor4<T> channel_projection<T>(const ParamTree<T>&, const std::string&,            \
                                            const Tensor4<T>&);                                 \
  template Tensor4<T> shuffle_mixer_layer<T>(const ParamTree<T>&, const std::string&,           \
                                             const Tensor4<T>&);                                \
  template Tensor4<T> feature_mixing_block<T>(const ParamTree<T>&, const ModelConfig&,          \
                                              const std::string&, const Tensor4<T>&);           \
  template Tensor4<T> upsampler<T>(const ParamTree<T>&, std::size_t, const Tensor4<T>&);

SMX_INSTANTIATE(float)
SMX_INSTANTIATE(double)
#undef SMX_INSTANTIATE

}  // namespace smx::model
