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

// Channel rearrangements, layer norm, SiLU and pixel shuffle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "smx/ops.hpp"

namespace smx::ops {
namespace {

using Index = std::int64_t;

template <typename T>
void copy_plane(const Tensor4<T>& src, std::size_t si, std::size_t sc, Tensor4<T>& dst,
                std::size_t di, std::size_t dc) {
  const T* s = src.plane(si, sc);
  std::copy(s, s + src.shape().plane(), dst.plane(di, dc));
}

}  // namespace

template <typename T>
std::pair<Tensor4<T>, Tensor4<T>> channel_split(const Tensor4<T>& x) {
  if (x.c() % 2 != 0) {
    throw ConfigError("channel_split: channel count must be even, got " + std::to_string(x.c()));
  }
  const std::size_t half = x.c() / 2;
  Tensor4<T> a(x.n(), half, x.h(), x.w());
  Tensor4<T> b(x.n(), half, x.h(), x.w());
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < half; ++j) {
      copy_plane(x, i, j, a, i, j);
      copy_plane(x, i, half + j, b, i, j);
    }
  }
  return {std::move(a), std::move(b)};
}

template <typename T>
Tensor4<T> channel_concat(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w()) {
    throw ShapeError("channel_concat: incompatible shapes " + a.shape().str() + " and " +
                     b.shape().str());
  }
  Tensor4<T> out(a.n(), a.c() + b.c(), a.h(), a.w());
  for (std::size_t i = 0; i < a.n(); ++i) {
    for (std::size_t j = 0; j < a.c(); ++j) copy_plane(a, i, j, out, i, j);
    for (std::size_t j = 0; j < b.c(); ++j) copy_plane(b, i, j, out, i, a.c() + j);
  }
  return out;
}

template <typename T>
Tensor4<T> channel_shuffle(const Tensor4<T>& x, std::size_t groups) {
  if (groups == 0 || x.c() % groups != 0) {
    throw ConfigError("channel_shuffle: " + std::to_string(x.c()) +
                      " channels not divisible by " + std::to_string(groups) + " groups");
  }
  const std::size_t per_group = x.c() / groups;
  Tensor4<T> out(x.shape());
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < x.c(); ++j) {
      copy_plane(x, i, (j % groups) * per_group + j / groups, out, i, j);
    }
  }
  return out;
}

template <typename T>
Tensor4<T> layer_norm_channels(const Tensor4<T>& x, const NormWeight<T>& w) {
  if (w.gamma.size() != x.c()) {
    throw ShapeError("layer_norm_channels: gamma length " + std::to_string(w.gamma.size()) +
                     " != channels " + std::to_string(x.c()));
  }
  const Index N = static_cast<Index>(x.n());
  const Index C = static_cast<Index>(x.c());
  const Index P = static_cast<Index>(x.shape().plane());
  Tensor4<T> out(x.shape());
  const T* src = x.data().data();
  T* dst = out.data().data();

#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < N * P; ++idx) {
    const Index i = idx / P;
    const Index p = idx % P;
    const T* s = src + i * C * P + p;
    T* d = dst + i * C * P + p;
    T mean = T(0);
    for (Index c = 0; c < C; ++c) mean += s[c * P];
    mean /= static_cast<T>(C);
    T var = T(0);
    for (Index c = 0; c < C; ++c) {
      const T dv = s[c * P] - mean;
      var += dv * dv;
    }
    var /= static_cast<T>(C);
    const T inv = T(1) / std::sqrt(var + w.eps);
    for (Index c = 0; c < C; ++c) d[c * P] = w.gamma[c] * (s[c * P] - mean) * inv;
  }
  return out;
}

template <typename T>
NormGrads<T> layer_norm_vjp(const Tensor4<T>& x, const NormWeight<T>& w, const Tensor4<T>& dy) {
  if (w.gamma.size() != x.c()) {
    throw ShapeError("layer_norm_vjp: gamma length mismatch");
  }
  require_same_shape(x.shape(), dy.shape(), "layer_norm_vjp");
  const Index N = static_cast<Index>(x.n());
  const Index C = static_cast<Index>(x.c());
  const Index P = static_cast<Index>(x.shape().plane());
  NormGrads<T> g{Tensor4<T>(x.shape()), std::vector<T>(x.c(), T(0))};
  std::vector<T> means(static_cast<std::size_t>(N * P));
  std::vector<T> invs(static_cast<std::size_t>(N * P));
  const T* src = x.data().data();
  const T* gy = dy.data().data();
  T* dx = g.input.data().data();
  const T inv_c = T(1) / static_cast<T>(C);

#pragma omp parallel for schedule(static)
  for (Index idx = 0; idx < N * P; ++idx) {
    const Index i = idx / P;
    const Index p = idx % P;
    const Index base = i * C * P + p;
    T mean = T(0);
    for (Index c = 0; c < C; ++c) mean += src[base + c * P];
    mean *= inv_c;
    T var = T(0);
    for (Index c = 0; c < C; ++c) {
      const T dv = src[base + c * P] - mean;
      var += dv * dv;
    }
    var *= inv_c;
    const T inv = T(1) / std::sqrt(var + w.eps);
    means[idx] = mean;
    invs[idx] = inv;
    T m1 = T(0);
    T m2 = T(0);
    for (Index c = 0; c < C; ++c) {
      const T xhat = (src[base + c * P] - mean) * inv;
      const T dxhat = gy[base + c * P] * w.gamma[c];
      m1 += dxhat;
      m2 += dxhat * xhat;
    }
    m1 *= inv_c;
    m2 *= inv_c;
    for (Index c = 0; c < C; ++c) {
      const T xhat = (src[base + c * P] - mean) * inv;
      const T dxhat = gy[base + c * P] * w.gamma[c];
      dx[base + c * P] = inv * (dxhat - m1 - xhat * m2);
    }
  }

#pragma omp parallel for schedule(static)
  for (Index c = 0; c < C; ++c) {
    T acc = T(0);
    for (Index i = 0; i < N; ++i) {
      for (Index p = 0; p < P; ++p) {
        const Index at = (i * C + c) * P + p;
        acc += gy[at] * (src[at] - means[i * P + p]) * invs[i * P + p];
      }
    }
    g.gamma[c] = acc;
  }
  return g;
}

template <typename T>
Tensor4<T> silu(const Tensor4<T>& x) {
  Tensor4<T> out(x.shape());
  const auto s = x.data();
  auto d = out.data();
  for (std::size_t i = 0; i < s.size(); ++i) d[i] = s[i] / (T(1) + std::exp(-s[i]));
  return out;
}

template <typename T>
Tensor4<T> silu_vjp(const Tensor4<T>& x, const Tensor4<T>& dy) {
  require_same_shape(x.shape(), dy.shape(), "silu_vjp");
  Tensor4<T> out(x.shape());
  const auto s = x.data();
  const auto g = dy.data();
  auto d = out.data();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const T sig = T(1) / (T(1) + std::exp(-s[i]));
    d[i] = g[i] * (sig + s[i] * sig * (T(1) - sig));
  }
  return out;
}

template <typename T>
Tensor4<T> pixel_shuffle(const Tensor4<T>& x, std::size_t r) {
  if (r == 0 || x.c() % (r * r) != 0) {
    throw ConfigError("pixel_shuffle: " + std::to_string(x.c()) +
                      " channels not divisible by r^2 for r=" + std::to_string(r));
  }
  const std::size_t oc = x.c() / (r * r);
  Tensor4<T> out(x.n(), oc, x.h() * r, x.w() * r);
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < oc; ++j) {
      for (std::size_t y = 0; y < out.h(); ++y) {
        for (std::size_t xx = 0; xx < out.w(); ++xx) {
          out(i, j, y, xx) = x(i, j * r * r + (y % r) * r + (xx % r), y / r, xx / r);
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> pixel_unshuffle(const Tensor4<T>& x, std::size_t r) {
  if (r == 0 || x.h() % r != 0 || x.w() % r != 0) {
    throw ConfigError("pixel_unshuffle: spatial size " + x.shape().str() +
                      " not divisible by r=" + std::to_string(r));
  }
  const std::size_t oh = x.h() / r;
  const std::size_t ow = x.w() / r;
  Tensor4<T> out(x.n(), x.c() * r * r, oh, ow);
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < x.c(); ++j) {
      for (std::size_t y = 0; y < x.h(); ++y) {
        for (std::size_t xx = 0; xx < x.w(); ++xx) {
          out(i, j * r * r + (y % r) * r + (xx % r), y / r, xx / r) = x(i, j, y, xx);
        }
      }
    }
  }
  return out;
}

#define SMX_INSTANTIATE(T)                                                                  \
  template std::pair<Tensor4<T>, Tensor4<T>> channel_split<T>(const Tensor4<T>&);         \
  template Tensor4<T> channel_concat<T>(const Tensor4<T>&, const Tensor4<T>&);            \
  template Tensor4<T> channel_shuffle<T>(const Tensor4<T>&, std::size_t);                 \
  template Tensor4<T> layer_norm_channels<T>(const Tensor4<T>&, const NormWeight<T>&);    \
  template NormGrads<T> layer_norm_vjp<T>(const Tensor4<T>&, const NormWeight<T>&,        \
                                          const Tensor4<T>&);                             \
  template Tensor4<T> silu<T>(const Tensor4<T>&);                                         \
  template Tensor4<T> silu_vjp<T>(const Tensor4<T>&, const Tensor4<T>&);                  \
  template Tensor4<T> pixel_shuffle<T>(const Tensor4<T>&, std::size_t);                   \
  template Tensor4<T> pixel_unshuffle<T>(const Tensor4<T>&, std::size_t);

SMX_INSTANTIATE(float)
SMX_INSTANTIATE(double)
#undef SMX_INSTANTIATE

}  // namespace smx::ops
