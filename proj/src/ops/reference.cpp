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

#include "smx/reference.hpp"

#include <cmath>

namespace smx::reference {

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ops::ConvWeight<T>& w) {
  ops::check_conv(x.shape(), w);
  const long H = static_cast<long>(x.h());
  const long W = static_cast<long>(x.w());
  const long K = static_cast<long>(w.k());
  const long pad = K / 2;
  const std::size_t cg = w.in_per_group();
  const std::size_t opg = w.out_ch() / w.groups;
  Tensor4<T> out(x.n(), w.out_ch(), x.h(), x.w());
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t o = 0; o < w.out_ch(); ++o) {
      const std::size_t first_in = (o / opg) * cg;
      for (long y = 0; y < H; ++y) {
        for (long xx = 0; xx < W; ++xx) {
          T acc = w.bias.empty() ? T(0) : w.bias[o];
          for (std::size_t cl = 0; cl < cg; ++cl) {
            for (long ky = 0; ky < K; ++ky) {
              for (long kx = 0; kx < K; ++kx) {
                const long sy = y + ky - pad;
                const long sx = xx + kx - pad;
                if (sy < 0 || sy >= H || sx < 0 || sx >= W) continue;
                acc += w.coeffs(o, cl, ky, kx) * x(i, first_in + cl, sy, sx);
              }
            }
          }
          out(i, o, y, xx) = acc;
        }
      }
    }
  }
  return out;
}

template <typename T>
ops::ConvGrads<T> conv2d_vjp(const Tensor4<T>& x, const ops::ConvWeight<T>& w,
                             const Tensor4<T>& dy) {
  ops::check_conv(x.shape(), w);
  const long H = static_cast<long>(x.h());
  const long W = static_cast<long>(x.w());
  const long K = static_cast<long>(w.k());
  const long pad = K / 2;
  const std::size_t cg = w.in_per_group();
  const std::size_t opg = w.out_ch() / w.groups;
  ops::ConvGrads<T> g{Tensor4<T>(x.shape()), Tensor4<T>(w.coeffs.shape()),
                      std::vector<T>(w.out_ch(), T(0))};
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t o = 0; o < w.out_ch(); ++o) {
      const std::size_t first_in = (o / opg) * cg;
      for (long y = 0; y < H; ++y) {
        for (long xx = 0; xx < W; ++xx) {
          const T gv = dy(i, o, y, xx);
          g.bias[o] += gv;
          for (std::size_t cl = 0; cl < cg; ++cl) {
            for (long ky = 0; ky < K; ++ky) {
              for (long kx = 0; kx < K; ++kx) {
                const long sy = y + ky - pad;
                const long sx = xx + kx - pad;
                if (sy < 0 || sy >= H || sx < 0 || sx >= W) continue;
                g.coeffs(o, cl, ky, kx) += gv * x(i, first_in + cl, sy, sx);
                g.input(i, first_in + cl, sy, sx) += gv * w.coeffs(o, cl, ky, kx);
              }
            }
          }
        }
      }
    }
  }
  return g;
}

template <typename T>
Tensor4<T> layer_norm_channels(const Tensor4<T>& x, const ops::NormWeight<T>& w) {
  Tensor4<T> out(x.shape());
  const auto C = static_cast<T>(x.c());
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t y = 0; y < x.h(); ++y) {
      for (std::size_t xx = 0; xx < x.w(); ++xx) {
        T mean = T(0);
        for (std::size_t c = 0; c < x.c(); ++c) mean += x(i, c, y, xx);
        mean /= C;
        T var = T(0);
        for (std::size_t c = 0; c < x.c(); ++c) {
          var += (x(i, c, y, xx) - mean) * (x(i, c, y, xx) - mean);
        }
        var /= C;
        for (std::size_t c = 0; c < x.c(); ++c) {
          out(i, c, y, xx) = w.gamma[c] * (x(i, c, y, xx) - mean) / std::sqrt(var + w.eps);
        }
      }
    }
  }
  return out;
}

template Tensor4<float> conv2d<float>(const Tensor4<float>&, const ops::ConvWeight<float>&);
template Tensor4<double> conv2d<double>(const Tensor4<double>&, const ops::ConvWeight<double>&);
template ops::ConvGrads<float> conv2d_vjp<float>(const Tensor4<float>&,
                                                 const ops::ConvWeight<float>&,
                                                 const Tensor4<float>&);
template ops::ConvGrads<double> conv2d_vjp<double>(const Tensor4<double>&,
                                                   const ops::ConvWeight<double>&,
                                                   const Tensor4<double>&);
template Tensor4<float> layer_norm_channels<float>(const Tensor4<float>&,
                                                   const ops::NormWeight<float>&);
template Tensor4<double> layer_norm_channels<double>(const Tensor4<double>&,
                                                     const ops::NormWeight<double>&);

}  // namespace smx::reference
