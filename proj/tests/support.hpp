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

// Helpers shared by the test binaries.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <string>

#include "smx/rng.hpp"
#include "smx/tensor.hpp"

namespace smx::testing {

template <typename T>
Tensor4<T> random_tensor(Shape4 shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Tensor4<T> t(shape);
  Rng rng(seed);
  for (auto& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template <typename T>
double max_abs_diff(const Tensor4<T>& a, const Tensor4<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i])));
  }
  return m;
}

template <typename T>
double dot(const Tensor4<T>& a, const Tensor4<T>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a.data()[i]) * static_cast<double>(b.data()[i]);
  }
  return s;
}

/// Textbook O(N^2 M^2) 2-D DFT of one (h, w) plane.
inline std::vector<std::complex<double>> naive_dft2(const double* x, std::size_t h, std::size_t w) {
  std::vector<std::complex<double>> out(h * w);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      std::complex<double> acc = 0.0;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t xx = 0; xx < w; ++xx) {
          const double angle = -2.0 * std::numbers::pi *
                               (static_cast<double>(u * y % h) / static_cast<double>(h) +
                                static_cast<double>(v * xx % w) / static_cast<double>(w));
          acc += x[y * w + xx] * std::polar(1.0, angle);
        }
      }
      out[u * w + v] = acc;
    }
  }
  return out;
}

/// Naive cross-correlation with zero padding, stride 1, grouped.
inline Tensor4<double> naive_conv(const Tensor4<double>& x, const Tensor4<double>& coeffs,
                                  const std::vector<double>& bias, std::size_t groups) {
  const std::size_t out_ch = coeffs.n();
  const std::size_t cin_g = coeffs.c();
  const std::size_t k = coeffs.h();
  const std::size_t cout_g = out_ch / groups;
  const long pad = static_cast<long>(k / 2);
  Tensor4<double> y(x.n(), out_ch, x.h(), x.w());
  for (std::size_t n = 0; n < x.n(); ++n) {
    for (std::size_t o = 0; o < out_ch; ++o) {
      const std::size_t g = o / cout_g;
      for (std::size_t r = 0; r < x.h(); ++r) {
        for (std::size_t c = 0; c < x.w(); ++c) {
          double acc = bias.empty() ? 0.0 : bias[o];
          for (std::size_t i = 0; i < cin_g; ++i) {
            for (std::size_t dy = 0; dy < k; ++dy) {
              for (std::size_t dx = 0; dx < k; ++dx) {
                const long yy = static_cast<long>(r + dy) - pad;
                const long xx = static_cast<long>(c + dx) - pad;
                if (yy < 0 || xx < 0 || yy >= static_cast<long>(x.h()) ||
                    xx >= static_cast<long>(x.w())) {
                  continue;
                }
                acc += coeffs(o, i, dy, dx) *
                       x(n, g * cin_g + i, static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
              }
            }
          }
          y(n, o, r, c) = acc;
        }
      }
    }
  }
  return y;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    Rng rng(Rng::mix(static_cast<std::uint64_t>(std::filesystem::file_time_type::clock::now()
                                                    .time_since_epoch()
                                                    .count()),
                     ++counter));
    path_ = std::filesystem::temp_directory_path() /
            ("smx_" + tag + "_" + std::to_string(rng.next() % 1000000007ULL));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace smx::testing
