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

#include <algorithm>
#include <cstdint>
#include <string>

#include "smx/ops.hpp"

namespace smx::ops {
namespace {

using Index = std::int64_t;

// Valid [lo, hi) range of output coordinates whose source coordinate
// out + offset lands inside [0, extent).
inline void valid_range(Index extent, Index offset, Index& lo, Index& hi) {
  lo = std::max<Index>(0, -offset);
  hi = std::min<Index>(extent, extent - offset);
}

}  // namespace

template <typename T>
void check_conv(const Shape4& x, const ConvWeight<T>& w) {
  const auto& cs = w.coeffs.shape();
  if (cs.h != cs.w) {
    throw ShapeError("conv2d: kernel must be square, got " + cs.str());
  }
  if (cs.h % 2 == 0) {
    throw ConfigError("conv2d: kernel side must be odd, got " + std::to_string(cs.h));
  }
  if (w.groups == 0 || x.c != w.groups * cs.c) {
    throw ShapeError("conv2d: input " + x.str() + " incompatible with kernel " + cs.str() +
                     " and groups=" + std::to_string(w.groups));
  }
  if (cs.n % w.groups != 0) {
    throw ShapeError("conv2d: out channels " + std::to_string(cs.n) +
                     " not divisible by groups " + std::to_string(w.groups));
  }
  if (!w.bias.empty() && w.bias.size() != cs.n) {
    throw ShapeError("conv2d: bias length " + std::to_string(w.bias.size()) +
                     " != out channels " + std::to_string(cs.n));
  }
}

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ConvWeight<T>& w) {
  check_conv(x.shape(), w);
  const Index N = static_cast<Index>(x.n());
  const Index H = static_cast<Index>(x.h());
  const Index W = static_cast<Index>(x.w());
  const Index O = static_cast<Index>(w.out_ch());
  const Index Cg = static_cast<Index>(w.in_per_group());
  const Index K = static_cast<Index>(w.k());
  const Index pad = K / 2;
  const Index out_per_group = O / static_cast<Index>(w.groups);
  Tensor4<T> out(x.n(), w.out_ch(), x.h(), x.w());

#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < N * O; ++idx) {
    const Index i = idx / O;
    const Index o = idx % O;
    const Index g = o / out_per_group;
    T* dst = out.plane(i, o);
    const T b = w.bias.empty() ? T(0) : w.bias[o];
    std::fill(dst, dst + H * W, b);
    for (Index cl = 0; cl < Cg; ++cl) {
      const T* src = x.plane(i, g * Cg + cl);
      for (Index ky = 0; ky < K; ++ky) {
        const Index oy = ky - pad;
        Index y0, y1;
        valid_range(H, oy, y0, y1);
        for (Index kx = 0; kx < K; ++kx) {
          const Index ox = kx - pad;
          Index x0, x1;
          valid_range(W, ox, x0, x1);
          const T wv = w.coeffs(o, cl, ky, kx);
          for (Index y = y0; y < y1; ++y) {
            const T* s = src + (y + oy) * W + ox;
            T* d = dst + y * W;
            for (Index xx = x0; xx < x1; ++xx) d[xx] += wv * s[xx];
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
ConvGrads<T> conv2d_vjp(const Tensor4<T>& x, const ConvWeight<T>& w, const Tensor4<T>& dy) {
  check_conv(x.shape(), w);
  require_same_shape(dy.shape(), Shape4{x.n(), w.out_ch(), x.h(), x.w()}, "conv2d_vjp");
  const Index N = static_cast<Index>(x.n());
  const Index C = static_cast<Index>(x.c());
  const Index H = static_cast<Index>(x.h());
  const Index W = static_cast<Index>(x.w());
  const Index O = static_cast<Index>(w.out_ch());
  const Index Cg = static_cast<Index>(w.in_per_group());
  const Index K = static_cast<Index>(w.k());
  const Index pad = K / 2;
  const Index out_per_group = O / static_cast<Index>(w.groups);

  ConvGrads<T> g{Tensor4<T>(x.shape()), Tensor4<T>(w.coeffs.shape()),
                 std::vector<T>(w.out_ch(), T(0))};

  // Input gradient: one (batch, input channel) plane per task.
#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < N * C; ++idx) {
    const Index i = idx / C;
    const Index ci = idx % C;
    const Index grp = ci / Cg;
    const Index cl = ci % Cg;
    T* dx = g.input.plane(i, ci);
    for (Index o = grp * out_per_group; o < (grp + 1) * out_per_group; ++o) {
      const T* gy = dy.plane(i, o);
      for (Index ky = 0; ky < K; ++ky) {
        const Index oy = ky - pad;
        Index y0, y1;
        valid_range(H, oy, y0, y1);
        for (Index kx = 0; kx < K; ++kx) {
          const Index ox = kx - pad;
          Index x0, x1;
          valid_range(W, ox, x0, x1);
          const T wv = w.coeffs(o, cl, ky, kx);
          for (Index y = y0; y < y1; ++y) {
            T* d = dx + (y + oy) * W + ox;
            const T* s = gy + y * W;
            for (Index xx = x0; xx < x1; ++xx) d[xx] += wv * s[xx];
          }
        }
      }
    }
  }

  // Coefficient gradient: one (out channel, group-local input channel) pair
  // per task, reduced over batch and pixels in a fixed order.
#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < O * Cg; ++idx) {
    const Index o = idx / Cg;
    const Index cl = idx % Cg;
    const Index ci = (o / out_per_group) * Cg + cl;
    for (Index ky = 0; ky < K; ++ky) {
      const Index oy = ky - pad;
      Index y0, y1;
      valid_range(H, oy, y0, y1);
      for (Index kx = 0; kx < K; ++kx) {
        const Index ox = kx - pad;
        Index x0, x1;
        valid_range(W, ox, x0, x1);
        T acc = T(0);
        for (Index i = 0; i < N; ++i) {
          const T* gy = dy.plane(i, o);
          const T* src = x.plane(i, ci);
          for (Index y = y0; y < y1; ++y) {
            const T* s = src + (y + oy) * W + ox;
            const T* d = gy + y * W;
            for (Index xx = x0; xx < x1; ++xx) acc += d[xx] * s[xx];
          }
        }
        g.coeffs(o, cl, ky, kx) = acc;
      }
    }
  }

  for (Index o = 0; o < O; ++o) {
    T acc = T(0);
    for (Index i = 0; i < N; ++i) {
      const T* gy = dy.plane(i, o);
      for (Index p = 0; p < H * W; ++p) acc += gy[p];
    }
    g.bias[o] = acc;
  }
  return g;
}

template <typename T>
Tensor4<T> depthwise_conv2d(const Tensor4<T>& x, const ConvWeight<T>& w) {
  const std::size_t k = w.k();
  if (k < 3 || k > 13 || k % 2 == 0) {
    throw ConfigError("depthwise_conv2d: kernel side must be one of 3,5,7,9,11,13, got " +
                      std::to_string(k));
  }
  if (w.groups != x.c() || w.in_per_group() != 1 || w.out_ch() != x.c()) {
    throw ShapeError("depthwise_conv2d: expected " + std::to_string(x.c()) +
                     " single-channel filters, got kernel " + w.coeffs.shape().str() +
                     " groups=" + std::to_string(w.groups));
  }
  return conv2d(x, w);
}

#define SMX_INSTANTIATE(T)                                                                 \
  template void check_conv<T>(const Shape4&, const ConvWeight<T>&);                        \
  template Tensor4<T> conv2d<T>(const Tensor4<T>&, const ConvWeight<T>&);                  \
  template ConvGrads<T> conv2d_vjp<T>(const Tensor4<T>&, const ConvWeight<T>&,             \
                                      const Tensor4<T>&);                                  \
  template Tensor4<T> depthwise_conv2d<T>(const Tensor4<T>&, const ConvWeight<T>&);

SMX_INSTANTIATE(float)
SMX_INSTANTIATE(double)
#undef SMX_INSTANTIATE

}  // namespace smx::ops
