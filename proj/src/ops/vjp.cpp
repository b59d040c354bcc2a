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

#include "smx/vjp.hpp"

#include <string>

#include "smx/loss.hpp"
#include "smx/ops.hpp"
#include "smx/spectral.hpp"

namespace smx::ops {
namespace {

void expect_inputs(OpKind op, std::size_t got, std::size_t lo, std::size_t hi) {
  if (got < lo || got > hi) {
    throw ShapeError(std::string(op_name(op)) + ": expected " + std::to_string(lo) +
                     (lo == hi ? "" : ".." + std::to_string(hi)) + " inputs, got " +
                     std::to_string(got));
  }
}

template <typename T>
Tensor4<T> vector_tensor(const std::vector<T>& v) {
  return Tensor4<T>(Shape4{v.size(), 1, 1, 1}, v);
}

template <typename T>
Tensor4<T> scalar_tensor(T v) {
  return Tensor4<T>(Shape4{1, 1, 1, 1}, v);
}

template <typename T>
T scalar_of(const Tensor4<T>& t, OpKind op) {
  if (t.size() != 1) {
    throw ShapeError(std::string(op_name(op)) + ": cotangent must be a scalar, got " +
                     t.shape().str());
  }
  return t.data()[0];
}

template <typename T>
ConvWeight<T> conv_weight(std::span<const Tensor4<T>> in) {
  const std::size_t groups = in[1].c() == 0 ? 1 : in[0].c() / in[1].c();
  return ConvWeight<T>{in[1], in.size() == 3 ? in[2].data() : std::span<const T>{},
                       groups == 0 ? 1 : groups};
}

[[noreturn]] void unknown(OpKind op) {
  throw ConfigError("unknown operator id " + std::to_string(static_cast<int>(op)));
}

}  // namespace

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::conv2d: return "conv2d";
    case OpKind::depthwise_conv2d: return "depthwise_conv2d";
    case OpKind::channel_split: return "channel_split";
    case OpKind::channel_concat: return "channel_concat";
    case OpKind::channel_shuffle: return "channel_shuffle";
    case OpKind::layer_norm: return "layer_norm";
    case OpKind::silu: return "silu";
    case OpKind::pixel_shuffle: return "pixel_shuffle";
    case OpKind::pixel_unshuffle: return "pixel_unshuffle";
    case OpKind::bilinear_resize: return "bilinear_resize";
    case OpKind::bicubic_resize: return "bicubic_resize";
    case OpKind::l1_loss: return "l1_loss";
    case OpKind::frequency_loss: return "frequency_loss";
  }
  return "unknown";
}

template <typename T>
Tensor4<T> forward(OpKind op, std::span<const Tensor4<T>> in, const OpAttrs& attrs) {
  switch (op) {
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul: {
      expect_inputs(op, in.size(), 2, 2);
      const auto e = op == OpKind::add   ? ElementwiseOp::add
                     : op == OpKind::sub ? ElementwiseOp::sub
                                         : ElementwiseOp::mul;
      return elementwise(in[0], in[1], e);
    }
    case OpKind::conv2d:
      expect_inputs(op, in.size(), 2, 3);
      return conv2d(in[0], conv_weight(in));
    case OpKind::depthwise_conv2d:
      expect_inputs(op, in.size(), 2, 3);
      return depthwise_conv2d(in[0], conv_weight(in));
    case OpKind::channel_split: {
      expect_inputs(op, in.size(), 1, 1);
      auto [a, b] = channel_split(in[0]);
      return channel_concat(a, b);
    }
    case OpKind::channel_concat:
      expect_inputs(op, in.size(), 2, 2);
      return channel_concat(in[0], in[1]);
    case OpKind::channel_shuffle:
      expect_inputs(op, in.size(), 1, 1);
      return channel_shuffle(in[0], attrs.groups);
    case OpKind::layer_norm:
      expect_inputs(op, in.size(), 2, 2);
      return layer_norm_channels(in[0], NormWeight<T>{in[1].data(), static_cast<T>(attrs.eps)});
    case OpKind::silu:
      expect_inputs(op, in.size(), 1, 1);
      return silu(in[0]);
    case OpKind::pixel_shuffle:
      expect_inputs(op, in.size(), 1, 1);
      return pixel_shuffle(in[0], attrs.factor);
    case OpKind::pixel_unshuffle:
      expect_inputs(op, in.size(), 1, 1);
      return pixel_unshuffle(in[0], attrs.factor);
    case OpKind::bilinear_resize:
      expect_inputs(op, in.size(), 1, 1);
      return bilinear_resize(in[0], attrs.factor);
    case OpKind::bicubic_resize:
      expect_inputs(op, in.size(), 1, 1);
      return bicubic_resize(in[0], attrs.scale);
    case OpKind::l1_loss:
      expect_inputs(op, in.size(), 2, 2);
      return scalar_tensor(train::l1_loss(in[0], in[1]));
    case OpKind::frequency_loss:
      expect_inputs(op, in.size(), 2, 2);
      return scalar_tensor(spectral::frequency_loss(in[0], in[1]));
  }
  unknown(op);
}

template <typename T>
std::vector<Tensor4<T>> vjp(OpKind op, std::span<const Tensor4<T>> in, const OpAttrs& attrs,
                            const Tensor4<T>& dy) {
  switch (op) {
    case OpKind::add:
      expect_inputs(op, in.size(), 2, 2);
      require_same_shape(in[0].shape(), dy.shape(), "add vjp");
      return {dy, dy};
    case OpKind::sub:
      expect_inputs(op, in.size(), 2, 2);
      require_same_shape(in[0].shape(), dy.shape(), "sub vjp");
      return {dy, scaled(dy, T(-1))};
    case OpKind::mul:
      expect_inputs(op, in.size(), 2, 2);
      return {mul(dy, in[1]), mul(dy, in[0])};
    case OpKind::conv2d:
    case OpKind::depthwise_conv2d: {
      expect_inputs(op, in.size(), 2, 3);
      const ConvWeight<T> w = conv_weight(in);
      if (op == OpKind::depthwise_conv2d) (void)depthwise_conv2d(in[0], w);
      ConvGrads<T> g = conv2d_vjp(in[0], w, dy);
      std::vector<Tensor4<T>> out{std::move(g.input), std::move(g.coeffs)};
      if (in.size() == 3) out.push_back(vector_tensor(g.bias));
      return out;
    }
    case OpKind::channel_split:
      expect_inputs(op, in.size(), 1, 1);
      require_same_shape(in[0].shape(), dy.shape(), "channel_split vjp");
      return {dy};
    case OpKind::channel_concat: {
      expect_inputs(op, in.size(), 2, 2);
      Tensor4<T> da(in[0].shape());
      Tensor4<T> db(in[1].shape());
      require_same_shape(dy.shape(), Shape4{in[0].n(), in[0].c() + in[1].c(), in[0].h(), in[0].w()},
                         "channel_concat vjp");
      for (std::size_t i = 0; i < dy.n(); ++i) {
        for (std::size_t j = 0; j < dy.c(); ++j) {
          const T* src = dy.plane(i, j);
          T* dst = j < in[0].c() ? da.plane(i, j) : db.plane(i, j - in[0].c());
          std::copy(src, src + dy.shape().plane(), dst);
        }
      }
      return {std::move(da), std::move(db)};
    }
    case OpKind::channel_shuffle:
      expect_inputs(op, in.size(), 1, 1);
      require_same_shape(in[0].shape(), dy.shape(), "channel_shuffle vjp");
      if (attrs.groups == 0 || in[0].c() % attrs.groups != 0) {
        throw ConfigError("channel_shuffle vjp: invalid group count");
      }
      return {channel_shuffle(dy, in[0].c() / attrs.groups)};
    case OpKind::layer_norm: {
      expect_inputs(op, in.size(), 2, 2);
      NormGrads<T> g =
          layer_norm_vjp(in[0], NormWeight<T>{in[1].data(), static_cast<T>(attrs.eps)}, dy);
      return {std::move(g.input), vector_tensor(g.gamma)};
    }
    case OpKind::silu:
      expect_inputs(op, in.size(), 1, 1);
      return {silu_vjp(in[0], dy)};
    case OpKind::pixel_shuffle:
      expect_inputs(op, in.size(), 1, 1);
      return {pixel_unshuffle(dy, attrs.factor)};
    case OpKind::pixel_unshuffle:
      expect_inputs(op, in.size(), 1, 1);
      return {pixel_shuffle(dy, attrs.factor)};
    case OpKind::bilinear_resize:
      expect_inputs(op, in.size(), 1, 1);
      return {bilinear_resize_vjp(in[0].shape(), attrs.factor, dy)};
    case OpKind::bicubic_resize:
      expect_inputs(op, in.size(), 1, 1);
      return {bicubic_resize_vjp(in[0].shape(), attrs.scale, dy)};
    case OpKind::l1_loss: {
      expect_inputs(op, in.size(), 2, 2);
      Tensor4<T> g = train::l1_loss_vjp(in[0], in[1], scalar_of(dy, op));
      Tensor4<T> neg = scaled(g, T(-1));
      return {std::move(g), std::move(neg)};
    }
    case OpKind::frequency_loss: {
      expect_inputs(op, in.size(), 2, 2);
      Tensor4<T> g = spectral::frequency_loss_vjp(in[0], in[1], scalar_of(dy, op));
      Tensor4<T> neg = scaled(g, T(-1));
      return {std::move(g), std::move(neg)};
    }
  }
  unknown(op);
}

template Tensor4<float> forward<float>(OpKind, std::span<const Tensor4<float>>, const OpAttrs&);
template Tensor4<double> forward<double>(OpKind, std::span<const Tensor4<double>>,
                                         const OpAttrs&);
template std::vector<Tensor4<float>> vjp<float>(OpKind, std::span<const Tensor4<float>>,
                                                const OpAttrs&, const Tensor4<float>&);
template std::vector<Tensor4<double>> vjp<double>(OpKind, std::span<const Tensor4<double>>,
                                                  const OpAttrs&, const Tensor4<double>&);

}  // namespace smx::ops
