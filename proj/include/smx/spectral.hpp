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

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "smx/tensor.hpp"

namespace smx::spectral {

/// Per-(batch, channel) complex spectrum; re and im share one shape.
template <typename T>
struct ComplexPlane {
  Tensor4<T> re;
  Tensor4<T> im;
};

enum class FftAlgorithm { automatic, radix2, bluestein };

/// Precomputed 1-D transform of a fixed length. Power-of-two lengths use an
/// iterative radix-2 kernel; everything else goes through Bluestein's chirp-z
/// reduction onto a power-of-two convolution. Immutable after construction.
template <typename T>
class FftPlan {
 public:
  explicit FftPlan(std::size_t length, FftAlgorithm algo = FftAlgorithm::automatic);

  std::size_t length() const noexcept { return n_; }
  bool uses_bluestein() const noexcept { return bluestein_; }

  /// Unnormalized in-place transform; inverse flips the exponent sign only.
  void transform(std::span<std::complex<T>> data, bool inverse) const;

 private:
  void radix2(std::span<std::complex<T>> data, bool inverse) const;

  std::size_t n_;
  bool bluestein_;
  std::vector<std::complex<T>> twiddles_;  // e^{-2 pi i k / n_}, k < n_/2
  std::vector<std::size_t> bitrev_;
  // Bluestein state.
  std::size_t m_ = 0;
  std::vector<std::complex<T>> chirp_;         // e^{-i pi k^2 / n}
  std::vector<std::complex<T>> kernel_fwd_;    // FFT_m of conj chirp, forward
  std::vector<std::complex<T>> kernel_inv_;    // FFT_m of chirp, inverse
  std::vector<std::complex<T>> inner_twiddles_;
  std::vector<std::size_t> inner_bitrev_;
};

/// Unnormalized forward 2-D DFT over (h, w) of every (batch, channel) slice.
template <typename T>
ComplexPlane<T> fft2d(const Tensor4<T>& x, FftAlgorithm algo = FftAlgorithm::automatic);

template <typename T>
ComplexPlane<T> fft2d(const ComplexPlane<T>& x, FftAlgorithm algo = FftAlgorithm::automatic);

/// Inverse 2-D DFT with 1/(h*w) normalization.
template <typename T>
ComplexPlane<T> ifft2d(const ComplexPlane<T>& x);

/// Mean over all bins of |d re| + |d im|, where d = fft2d(sr) - fft2d(gt).
template <typename T>
T frequency_loss(const Tensor4<T>& sr, const Tensor4<T>& gt);

/// Gradient of cotangent * frequency_loss with respect to sr (the gt
/// gradient is its negation). Sign at an exact zero is taken as 0.
template <typename T>
Tensor4<T> frequency_loss_vjp(const Tensor4<T>& sr, const Tensor4<T>& gt, T cotangent);

}  // namespace smx::spectral
