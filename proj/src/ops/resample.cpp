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

// Separable resampling. Each axis is described by a table of (source index,
// weight) taps per output index; the forward pass gathers along width then
// height, the vjp scatters through the transposed tables in reverse order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "smx/ops.hpp"

namespace smx::ops {
namespace {

using Index = std::int64_t;

struct Tap {
  std::size_t src;
  double weight;
};

struct AxisTable {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<std::vector<Tap>> taps;  // one list per output index
};

AxisTable bilinear_table(std::size_t in, std::size_t s) {
  AxisTable t{in, in * s, {}};
  t.taps.resize(t.out);
  const double last = static_cast<double>(in - 1);
  for (std::size_t o = 0; o < t.out; ++o) {
    double src = (static_cast<double>(o) + 0.5) / static_cast<double>(s) - 0.5;
    src = std::clamp(src, 0.0, last);
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    const std::size_t i1 = std::min(i0 + 1, in - 1);
    const double f = src - static_cast<double>(i0);
    t.taps[o] = {{i0, 1.0 - f}, {i1, f}};
  }
  return t;
}

AxisTable bicubic_table(std::size_t in, double scale) {
  AxisTable t{in, resized_extent(in, scale), {}};
  t.taps.resize(t.out);
  const double kscale = std::min(scale, 1.0);
  const double support = 2.0 / kscale;
  const auto last = static_cast<Index>(in) - 1;
  for (std::size_t o = 0; o < t.out; ++o) {
    const double center = (static_cast<double>(o) + 0.5) / scale - 0.5;
    const auto lo = static_cast<Index>(std::ceil(center - support));
    const auto hi = static_cast<Index>(std::floor(center + support));
    double sum = 0.0;
    auto& taps = t.taps[o];
    for (Index j = lo; j <= hi; ++j) {
      const double wgt = cubic_kernel((static_cast<double>(j) - center) * kscale);
      if (wgt == 0.0) continue;
      taps.push_back({static_cast<std::size_t>(std::clamp<Index>(j, 0, last)), wgt});
      sum += wgt;
    }
    for (auto& tap : taps) tap.weight /= sum;
  }
  return t;
}

template <typename T>
Tensor4<T> apply(const Tensor4<T>& x, const AxisTable& rows, const AxisTable& cols) {
  const std::size_t H = x.h();
  const std::size_t W = x.w();
  const std::size_t OH = rows.out;
  const std::size_t OW = cols.out;
  const Index planes = static_cast<Index>(x.n() * x.c());
  Tensor4<T> out(x.n(), x.c(), OH, OW);

#pragma omp parallel for schedule(static)
  for (Index pl = 0; pl < planes; ++pl) {
    const T* src = x.data().data() + pl * H * W;
    T* dst = out.data().data() + pl * OH * OW;
    std::vector<T> tmp(H * OW);
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t ox = 0; ox < OW; ++ox) {
        T acc = T(0);
        for (const Tap& tap : cols.taps[ox]) acc += static_cast<T>(tap.weight) * src[y * W + tap.src];
        tmp[y * OW + ox] = acc;
      }
    }
    for (std::size_t oy = 0; oy < OH; ++oy) {
      for (std::size_t ox = 0; ox < OW; ++ox) {
        T acc = T(0);
        for (const Tap& tap : rows.taps[oy]) acc += static_cast<T>(tap.weight) * tmp[tap.src * OW + ox];
        dst[oy * OW + ox] = acc;
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> apply_adjoint(const Shape4& input, const AxisTable& rows, const AxisTable& cols,
                         const Tensor4<T>& dy) {
  const std::size_t H = input.h;
  const std::size_t W = input.w;
  const std::size_t OH = rows.out;
  const std::size_t OW = cols.out;
  require_same_shape(dy.shape(), Shape4{input.n, input.c, OH, OW}, "resize_vjp");
  const Index planes = static_cast<Index>(input.n * input.c);
  Tensor4<T> dx(input);

#pragma omp parallel for schedule(static)
  for (Index pl = 0; pl < planes; ++pl) {
    const T* g = dy.data().data() + pl * OH * OW;
    T* d = dx.data().data() + pl * H * W;
    std::vector<T> tmp(H * OW, T(0));
    for (std::size_t oy = 0; oy < OH; ++oy) {
      for (const Tap& tap : rows.taps[oy]) {
        const T wv = static_cast<T>(tap.weight);
        for (std::size_t ox = 0; ox < OW; ++ox) tmp[tap.src * OW + ox] += wv * g[oy * OW + ox];
      }
    }
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t ox = 0; ox < OW; ++ox) {
        const T v = tmp[y * OW + ox];
        for (const Tap& tap : cols.taps[ox]) d[y * W + tap.src] += static_cast<T>(tap.weight) * v;
      }
    }
  }
  return dx;
}

void check_bilinear_factor(std::size_t s) {
  if (s < 2 || s > 4) {
    throw ConfigError("bilinear_resize: scale must be 2, 3 or 4, got " + std::to_string(s));
  }
}

void check_bicubic_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("bicubic_resize: scale must be positive, got " + std::to_string(scale));
  }
}

}  // namespace

double cubic_kernel(double t) noexcept {
  constexpr double a = -0.5;
  const double x = std::fabs(t);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

std::size_t resized_extent(std::size_t extent, double scale) {
  check_bicubic_scale(scale);
  const double v = std::round(static_cast<double>(extent) * scale);
  return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

template <typename T>
Tensor4<T> bilinear_resize(const Tensor4<T>& x, std::size_t s) {
  check_bilinear_factor(s);
  return apply(x, bilinear_table(x.h(), s), bilinear_table(x.w(), s));
}

template <typename T>
Tensor4<T> bilinear_resize_vjp(const Shape4& input, std::size_t s, const Tensor4<T>& dy) {
  check_bilinear_factor(s);
  return apply_adjoint(input, bilinear_table(input.h, s), bilinear_table(input.w, s), dy);
}

template <typename T>
Tensor4<T> bicubic_resize(const Tensor4<T>& x, double scale) {
  check_bicubic_scale(scale);
  return apply(x, bicubic_table(x.h(), scale), bicubic_table(x.w(), scale));
}

template <typename T>
Tensor4<T> bicubic_resize_vjp(const Shape4& input, double scale, const Tensor4<T>& dy) {
  check_bicubic_scale(scale);
  return apply_adjoint(input, bicubic_table(input.h, scale), bicubic_table(input.w, scale), dy);
}

#define SMX_INSTANTIATE(T)                                                                 \
  template Tensor4<T> bilinear_resize<T>(const Tensor4<T>&, std::size_t);                 \
  template Tensor4<T> bilinear_resize_vjp<T>(const Shape4&, std::size_t, const Tensor4<T>&); \
  template Tensor4<T> bicubic_resize<T>(const Tensor4<T>&, double);                       \
  template Tensor4<T> bicubic_resize_vjp<T>(const Shape4&, double, const Tensor4<T>&);

SMX_INSTANTIATE(float)
SMX_INSTANTIATE(double)
#undef SMX_INSTANTIATE

}  // namespace smx::ops
