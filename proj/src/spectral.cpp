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

#include "smx/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace smx::spectral {
namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::vector<std::size_t> bit_reversal(std::size_t n) {
  std::vector<std::size_t> rev(n, 0);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
    rev[i] = r;
  }
  return rev;
}

template <typename T>
std::vector<std::complex<T>> make_twiddles(std::size_t n) {
  std::vector<std::complex<T>> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = std::complex<T>(static_cast<T>(std::cos(angle)), static_cast<T>(std::sin(angle)));
  }
  return tw;
}

template <typename T>
void radix2_kernel(std::span<std::complex<T>> a, const std::vector<std::complex<T>>& tw,
                   const std::vector<std::size_t>& rev, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i < rev[i]) std::swap(a[i], a[rev[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<T> w = tw[k * stride];
        if (inverse) w = std::conj(w);
        const std::complex<T> u = a[start + k];
        const std::complex<T> v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

template <typename T>
void transform_rows_cols(Tensor4<T>& re, Tensor4<T>& im, const FftPlan<T>& rows,
                         const FftPlan<T>& cols, bool inverse) {
  const std::size_t H = re.h();
  const std::size_t W = re.w();
  const auto planes = static_cast<std::int64_t>(re.n() * re.c());

#pragma omp parallel for schedule(static)
  for (std::int64_t pl = 0; pl < planes; ++pl) {
    T* pr = re.data().data() + pl * H * W;
    T* pi = im.data().data() + pl * H * W;
    std::vector<std::complex<T>> buf(std::max(H, W));
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t x = 0; x < W; ++x) buf[x] = {pr[y * W + x], pi[y * W + x]};
      rows.transform(std::span(buf.data(), W), inverse);
      for (std::size_t x = 0; x < W; ++x) {
        pr[y * W + x] = buf[x].real();
        pi[y * W + x] = buf[x].imag();
      }
    }
    for (std::size_t x = 0; x < W; ++x) {
      for (std::size_t y = 0; y < H; ++y) buf[y] = {pr[y * W + x], pi[y * W + x]};
      cols.transform(std::span(buf.data(), H), inverse);
      for (std::size_t y = 0; y < H; ++y) {
        pr[y * W + x] = buf[y].real();
        pi[y * W + x] = buf[y].imag();
      }
    }
  }
}

template <typename T>
T sign_of(T v) {
  return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
}

}  // namespace

template <typename T>
FftPlan<T>::FftPlan(std::size_t length, FftAlgorithm algo) : n_(length) {
  if (length == 0) throw ConfigError("FftPlan: length must be >= 1");
  if (algo == FftAlgorithm::radix2 && !is_pow2(length)) {
    throw ConfigError("FftPlan: radix-2 requires a power-of-two length, got " +
                      std::to_string(length));
  }
  bluestein_ = algo == FftAlgorithm::bluestein || (algo == FftAlgorithm::automatic && !is_pow2(length));
  if (!bluestein_) {
    twiddles_ = make_twiddles<T>(n_);
    bitrev_ = bit_reversal(n_);
    return;
  }

  m_ = next_pow2(2 * n_ - 1);
  inner_twiddles_ = make_twiddles<T>(m_);
  inner_bitrev_ = bit_reversal(m_);
  chirp_.resize(n_);
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    // k^2 mod 2n keeps the angle argument small and exact.
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % two_n;
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_);
    chirp_[k] = std::complex<T>(static_cast<T>(std::cos(angle)), static_cast<T>(std::sin(angle)));
  }
  kernel_fwd_.assign(m_, std::complex<T>(0));
  kernel_inv_.assign(m_, std::complex<T>(0));
  for (std::size_t k = 0; k < n_; ++k) {
    kernel_fwd_[k] = std::conj(chirp_[k]);
    kernel_inv_[k] = chirp_[k];
    if (k != 0) {
      kernel_fwd_[m_ - k] = std::conj(chirp_[k]);
      kernel_inv_[m_ - k] = chirp_[k];
    }
  }
  radix2_kernel<T>(kernel_fwd_, inner_twiddles_, inner_bitrev_, false);
  radix2_kernel<T>(kernel_inv_, inner_twiddles_, inner_bitrev_, false);
}

template <typename T>
void FftPlan<T>::radix2(std::span<std::complex<T>> data, bool inverse) const {
  radix2_kernel<T>(data, twiddles_, bitrev_, inverse);
}

template <typename T>
void FftPlan<T>::transform(std::span<std::complex<T>> data, bool inverse) const {
  if (data.size() != n_) {
    throw ShapeError("FftPlan: expected length " + std::to_string(n_) + ", got " +
                     std::to_string(data.size()));
  }
  if (n_ == 1) return;
  if (!bluestein_) {
    radix2(data, inverse);
    return;
  }
  // X_k = c_k * sum_j (x_j c_j) conj(c_{k-j}), with c the chirp (conjugated
  // for the inverse direction).
  std::vector<std::complex<T>> a(m_, std::complex<T>(0));
  for (std::size_t k = 0; k < n_; ++k) {
    a[k] = data[k] * (inverse ? std::conj(chirp_[k]) : chirp_[k]);
  }
  radix2_kernel<T>(a, inner_twiddles_, inner_bitrev_, false);
  const auto& kernel = inverse ? kernel_inv_ : kernel_fwd_;
  for (std::size_t k = 0; k < m_; ++k) a[k] *= kernel[k];
  radix2_kernel<T>(a, inner_twiddles_, inner_bitrev_, true);
  const T scale = T(1) / static_cast<T>(m_);
  for (std::size_t k = 0; k < n_; ++k) {
    data[k] = a[k] * scale * (inverse ? std::conj(chirp_[k]) : chirp_[k]);
  }
}

template <typename T>
ComplexPlane<T> fft2d(const ComplexPlane<T>& x, FftAlgorithm algo) {
  require_same_shape(x.re.shape(), x.im.shape(), "fft2d");
  ComplexPlane<T> out{x.re, x.im};
  const FftPlan<T> rows(x.re.w(), algo);
  const FftPlan<T> cols(x.re.h(), algo);
  transform_rows_cols(out.re, out.im, rows, cols, false);
  return out;
}

template <typename T>
ComplexPlane<T> fft2d(const Tensor4<T>& x, FftAlgorithm algo) {
  return fft2d(ComplexPlane<T>{x, Tensor4<T>(x.shape())}, algo);
}

template <typename T>
ComplexPlane<T> ifft2d(const ComplexPlane<T>& x) {
  require_same_shape(x.re.shape(), x.im.shape(), "ifft2d");
  ComplexPlane<T> out{x.re, x.im};
  const FftPlan<T> rows(x.re.w());
  const FftPlan<T> cols(x.re.h());
  transform_rows_cols(out.re, out.im, rows, cols, true);
  const T scale = T(1) / static_cast<T>(x.re.h() * x.re.w());
  for (auto& v : out.re.data()) v *= scale;
  for (auto& v : out.im.data()) v *= scale;
  return out;
}

template <typename T>
T frequency_loss(const Tensor4<T>& sr, const Tensor4<T>& gt) {
  require_same_shape(sr.shape(), gt.shape(), "frequency_loss");
  const ComplexPlane<T> d = fft2d(sub(sr, gt));
  T acc = T(0);
  const auto re = d.re.data();
  const auto im = d.im.data();
  for (std::size_t i = 0; i < re.size(); ++i) acc += std::abs(re[i]) + std::abs(im[i]);
  return acc / static_cast<T>(re.size());
}

template <typename T>
Tensor4<T> frequency_loss_vjp(const Tensor4<T>& sr, const Tensor4<T>& gt, T cotangent) {
  require_same_shape(sr.shape(), gt.shape(), "frequency_loss_vjp");
  ComplexPlane<T> d = fft2d(sub(sr, gt));
  for (auto& v : d.re.data()) v = sign_of(v);
  for (auto& v : d.im.data()) v = -sign_of(v);
  const ComplexPlane<T> back = fft2d(d);
  const T scale = cotangent / static_cast<T>(sr.size());
  return scaled(back.re, scale);
}

template class FftPlan<float>;
template class FftPlan<double>;

#define SMX_INSTANTIATE(T)                                                            \
  template ComplexPlane<T> fft2d<T>(const Tensor4<T>&, FftAlgorithm);                \
  template ComplexPlane<T> fft2d<T>(const ComplexPlane<T>&, FftAlgorithm);           \
  template ComplexPlane<T> ifft2d<T>(const ComplexPlane<T>&);                        \
  template T frequency_loss<T>(const Tensor4<T>&, const Tensor4<T>&);                \
  template Tensor4<T> frequency_loss_vjp<T>(const Tensor4<T>&, const Tensor4<T>&, T);

SMX_INSTANTIATE(float)
SMX_INSTANTIATE(double)
#undef SMX_INSTANTIATE

}  // namespace smx::spectral
