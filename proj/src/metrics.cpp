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

#include "smx/metrics.hpp"

#include <array>
#include <cmath>

namespace smx::metrics {
namespace {

template <typename T>
Tensor4<double> luma(const Tensor4<T>& img) {
  if (img.c() != 3) {
    throw ShapeError("rgb_to_y expects 3 channels, got " + std::to_string(img.c()));
  }
  Tensor4<double> y(img.n(), 1, img.h(), img.w());
  const std::size_t plane = img.shape().plane();
  for (std::size_t i = 0; i < img.n(); ++i) {
    const T* r = img.plane(i, 0);
    const T* g = img.plane(i, 1);
    const T* b = img.plane(i, 2);
    double* out = y.plane(i, 0);
    for (std::size_t p = 0; p < plane; ++p) {
      out[p] = 16.0 + 65.481 * static_cast<double>(r[p]) + 128.553 * static_cast<double>(g[p]) +
               24.966 * static_cast<double>(b[p]);
    }
  }
  return y;
}

using Window = std::array<double, kSsimWindow * kSsimWindow>;

Window gaussian_window() {
  std::array<double, kSsimWindow> g{};
  const double half = static_cast<double>(kSsimWindow / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double d = static_cast<double>(i) - half;
    g[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i];
  }
  Window w{};
  for (std::size_t y = 0; y < kSsimWindow; ++y) {
    for (std::size_t x = 0; x < kSsimWindow; ++x) w[y * kSsimWindow + x] = g[y] * g[x] / (sum * sum);
  }
  return w;
}

void require_pair(const Tensor4<double>& a, const Tensor4<double>& b, const char* what) {
  require_same_shape(a.shape(), b.shape(), what);
}

}  // namespace

Tensor4<double> rgb_to_y(const Tensor4<double>& img) { return luma(img); }
Tensor4<double> rgb_to_y(const Tensor4<float>& img) { return luma(img); }

Tensor4<double> shave_border(const Tensor4<double>& img, std::size_t shave) {
  if (shave == 0) return img;
  if (img.h() <= 2 * shave || img.w() <= 2 * shave) {
    throw ConfigError("shave of " + std::to_string(shave) + " leaves no pixels in a " +
                      std::to_string(img.h()) + "x" + std::to_string(img.w()) + " image");
  }
  Tensor4<double> out(img.n(), img.c(), img.h() - 2 * shave, img.w() - 2 * shave);
  for (std::size_t i = 0; i < out.n(); ++i) {
    for (std::size_t j = 0; j < out.c(); ++j) {
      for (std::size_t y = 0; y < out.h(); ++y) {
        for (std::size_t x = 0; x < out.w(); ++x) out(i, j, y, x) = img(i, j, y + shave, x + shave);
      }
    }
  }
  return out;
}

double psnr(const Tensor4<double>& a, const Tensor4<double>& b, const EvalProtocol& proto) {
  require_pair(a, b, "psnr");
  const Tensor4<double> sa = shave_border(a, proto.shave);
  const Tensor4<double> sb = shave_border(b, proto.shave);
  double sse = 0.0;
  const auto av = sa.data();
  const auto bv = sb.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrIdentical;
  const double mse = sse / static_cast<double>(av.size());
  return 10.0 * std::log10(proto.data_range * proto.data_range / mse);
}

double ssim(const Tensor4<double>& a, const Tensor4<double>& b, const EvalProtocol& proto) {
  require_pair(a, b, "ssim");
  const Tensor4<double> sa = shave_border(a, proto.shave);
  const Tensor4<double> sb = shave_border(b, proto.shave);
  if (sa.h() < kSsimWindow || sa.w() < kSsimWindow) {
    throw ConfigError("ssim needs at least 11x11 pixels after shaving, got " +
                      std::to_string(sa.h()) + "x" + std::to_string(sa.w()));
  }
  static const Window win = gaussian_window();
  const double c1 = (0.01 * proto.data_range) * (0.01 * proto.data_range);
  const double c2 = (0.03 * proto.data_range) * (0.03 * proto.data_range);
  const std::size_t oh = sa.h() - kSsimWindow + 1;
  const std::size_t ow = sa.w() - kSsimWindow + 1;

  double total = 0.0;
  for (std::size_t i = 0; i < sa.n(); ++i) {
    for (std::size_t j = 0; j < sa.c(); ++j) {
      const double* pa = sa.plane(i, j);
      const double* pb = sb.plane(i, j);
      const std::size_t stride = sa.w();
      double plane_sum = 0.0;
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
          double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
          for (std::size_t u = 0; u < kSsimWindow; ++u) {
            for (std::size_t v = 0; v < kSsimWindow; ++v) {
              const double wt = win[u * kSsimWindow + v];
              const double va = pa[(y + u) * stride + x + v];
              const double vb = pb[(y + u) * stride + x + v];
              ma += wt * va;
              mb += wt * vb;
              saa += wt * va * va;
              sbb += wt * vb * vb;
              sab += wt * va * vb;
            }
          }
          const double var_a = saa - ma * ma;
          const double var_b = sbb - mb * mb;
          const double cov = sab - ma * mb;
          plane_sum += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
        }
      }
      total += plane_sum / static_cast<double>(oh * ow);
    }
  }
  return total / static_cast<double>(sa.n() * sa.c());
}

PairScore evaluate_rgb(const Tensor4<float>& sr, const Tensor4<float>& hr,
                       const EvalProtocol& proto) {
  require_same_shape(sr.shape(), hr.shape(), "evaluate_rgb");
  Tensor4<double> a;
  Tensor4<double> b;
  if (proto.y_only) {
    a = rgb_to_y(sr);
    b = rgb_to_y(hr);
  } else {
    a = scaled(sr.cast<double>(), proto.data_range);
    b = scaled(hr.cast<double>(), proto.data_range);
  }
  return {psnr(a, b, proto), ssim(a, b, proto)};
}

}  // namespace smx::metrics
