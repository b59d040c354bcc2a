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

#include <doctest.h>

#include "smx/spectral.hpp"
#include "support.hpp"

using namespace smx;
using spectral::ComplexPlane;
using spectral::FftAlgorithm;
using smx::testing::naive_dft2;
using smx::testing::random_tensor;

namespace {

/// max |fft - naive| / max |naive| over every slice.
double dft_error(const Tensor4<double>& x, FftAlgorithm algo) {
  const auto got = spectral::fft2d(x, algo);
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < x.c(); ++j) {
      const auto want = naive_dft2(x.plane(i, j), x.h(), x.w());
      const double* re = got.re.plane(i, j);
      const double* im = got.im.plane(i, j);
      for (std::size_t k = 0; k < want.size(); ++k) {
        err = std::max(err, std::abs(std::complex<double>(re[k], im[k]) - want[k]));
        scale = std::max(scale, std::abs(want[k]));
      }
    }
  }
  return err / scale;
}

}  // namespace

TEST_CASE("delta and constant images") {
  Tensor4<double> delta(1, 1, 6, 10);
  delta(0, 0, 0, 0) = 1.0;
  const auto d = spectral::fft2d(delta);
  for (double v : d.re.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : d.im.data()) CHECK(std::abs(v) < 1e-12);

  Tensor4<double> flat(1, 1, 5, 7, 0.3);
  const auto c = spectral::fft2d(flat);
  CHECK(c.re(0, 0, 0, 0) == doctest::Approx(0.3 * 35).epsilon(1e-12));
  for (std::size_t k = 1; k < 35; ++k) {
    CHECK(std::abs(c.re.data()[k]) < 1e-9);
    CHECK(std::abs(c.im.data()[k]) < 1e-9);
  }
}

TEST_CASE("fft2d matches the naive DFT") {
  const std::pair<std::size_t, std::size_t> sizes[] = {{4, 4}, {8, 8}, {7, 12}, {13, 5},
                                                       {1, 9}, {16, 3}, {11, 11}};
  std::uint64_t seed = 100;
  for (const auto& [h, w] : sizes) {
    CAPTURE(h);
    CAPTURE(w);
    const auto x = random_tensor<double>({2, 2, h, w}, ++seed);
    CHECK(dft_error(x, FftAlgorithm::automatic) < 1e-10);
  }
}

TEST_CASE("1-D plans agree with the naive DFT for lengths 1..40") {
  for (std::size_t n = 1; n <= 40; ++n) {
    CAPTURE(n);
    const auto x = random_tensor<double>({1, 1, 1, n}, 200 + n);
    const auto want = naive_dft2(x.plane(0, 0), 1, n);
    spectral::FftPlan<double> plan(n);
    std::vector<std::complex<double>> data(x.data().begin(), x.data().end());
    plan.transform(data, false);
    double err = 0, scale = 0;
    for (std::size_t k = 0; k < n; ++k) {
      err = std::max(err, std::abs(data[k] - want[k]));
      scale = std::max(scale, std::abs(want[k]));
    }
    CHECK(err / scale < 1e-10);
    CHECK(plan.uses_bluestein() == ((n & (n - 1)) != 0));
  }
}

TEST_CASE("Bluestein and radix-2 agree on power-of-two sizes") {
  for (std::size_t n : {2, 4, 8, 16, 32}) {
    const auto x = random_tensor<double>({1, 1, n, n}, 300 + n);
    const auto a = spectral::fft2d(x, FftAlgorithm::radix2);
    const auto b = spectral::fft2d(x, FftAlgorithm::bluestein);
    CHECK(smx::testing::max_abs_diff(a.re, b.re) < 1e-10);
    CHECK(smx::testing::max_abs_diff(a.im, b.im) < 1e-10);
  }
  CHECK_THROWS_AS(spectral::FftPlan<double>(12, FftAlgorithm::radix2), ConfigError);
}

TEST_CASE("Parseval and linearity") {
  for (const Shape4 s : {Shape4{1, 1, 4, 4}, Shape4{1, 2, 8, 8}, Shape4{2, 1, 7, 12}, Shape4{1, 1, 13, 5}}) {
    const auto x = random_tensor<double>(s, 400 + s.h);
    const auto X = spectral::fft2d(x);
    double energy_x = 0, energy_f = 0;
    for (double v : x.data()) energy_x += v * v;
    for (std::size_t k = 0; k < X.re.size(); ++k) {
      energy_f += X.re.data()[k] * X.re.data()[k] + X.im.data()[k] * X.im.data()[k];
    }
    CHECK(std::abs(energy_f - static_cast<double>(s.plane()) * energy_x) /
              (static_cast<double>(s.plane()) * energy_x) <
          1e-9);

    const auto y = random_tensor<double>(s, 500 + s.h);
    const auto lhs = spectral::fft2d(add(scaled(x, 2.5), scaled(y, -0.75)));
    const auto Y = spectral::fft2d(y);
    CHECK(smx::testing::max_abs_diff(lhs.re, add(scaled(X.re, 2.5), scaled(Y.re, -0.75))) < 1e-10);
    CHECK(smx::testing::max_abs_diff(lhs.im, add(scaled(X.im, 2.5), scaled(Y.im, -0.75))) < 1e-10);
  }
}

TEST_CASE("inverse transform") {
  for (const Shape4 s : {Shape4{1, 1, 8, 8}, Shape4{1, 3, 7, 12}, Shape4{1, 1, 13, 5}}) {
    const auto x = random_tensor<double>(s, 600 + s.w);
    const auto back = spectral::ifft2d(spectral::fft2d(x));
    CHECK(smx::testing::max_abs_diff(back.re, x) < 1e-9);
    for (double v : back.im.data()) CHECK(std::abs(v) < 1e-9);
  }
  ComplexPlane<double> zero{Tensor4<double>(1, 1, 4, 6), Tensor4<double>(1, 1, 4, 6)};
  const auto z = spectral::ifft2d(zero);
  for (double v : z.re.data()) CHECK(v == 0.0);

  ComplexPlane<double> dc{Tensor4<double>(1, 1, 4, 6), Tensor4<double>(1, 1, 4, 6)};
  dc.re(0, 0, 0, 0) = 24.0;
  const auto one = spectral::ifft2d(dc);
  for (double v : one.re.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : one.im.data()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("frequency loss examples") {
  const auto x = random_tensor<double>({1, 3, 6, 5}, 700);
  CHECK(spectral::frequency_loss(x, x) == 0.0);

  Tensor4<double> delta(1, 1, 6, 9);
  delta(0, 0, 0, 0) = 0.8;
  CHECK(spectral::frequency_loss(delta, Tensor4<double>(1, 1, 6, 9)) ==
        doctest::Approx(0.8).epsilon(1e-12));

  const auto y = random_tensor<double>({1, 3, 6, 5}, 701);
  const double base = spectral::frequency_loss(x, y);
  CHECK(spectral::frequency_loss(scaled(x, -2.0), scaled(y, -2.0)) ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
  CHECK_THROWS_AS(spectral::frequency_loss(x, Tensor4<double>(1, 3, 5, 6)), ShapeError);
}

TEST_CASE("float instantiation tracks double") {
  const auto x = random_tensor<double>({1, 2, 9, 16}, 800);
  const auto d = spectral::fft2d(x);
  const auto f = spectral::fft2d(x.cast<float>());
  CHECK(smx::testing::max_abs_diff(f.re.cast<double>(), d.re) < 1e-4);
}
