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

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smx/errors.hpp"

namespace smx {

/// Runtime precision. Verification paths instantiate the same code with
/// double end-to-end; a tensor never mixes the two.
using Real = float;

struct Shape4 {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  constexpr std::size_t numel() const noexcept { return n * c * h * w; }
  constexpr std::size_t plane() const noexcept { return h * w; }
  friend constexpr bool operator==(const Shape4&, const Shape4&) = default;

  std::string str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
           std::to_string(h) + "," + std::to_string(w) + ")";
  }
};

/// Dense (batch, channel, row, col) array; column index varies fastest.
template <typename T>
class Tensor4 {
 public:
  using value_type = T;

  Tensor4() : Tensor4(Shape4{}) {}

  explicit Tensor4(Shape4 shape, T fill = T(0)) : shape_(shape) {
    if (shape.n == 0 || shape.c == 0 || shape.h == 0 || shape.w == 0) {
      throw ShapeError("tensor extents must be >= 1, got " + shape.str());
    }
    data_.assign(shape.numel(), fill);
  }

  Tensor4(Shape4 shape, std::vector<T> values) : shape_(shape), data_(std::move(values)) {
    if (shape.n == 0 || shape.c == 0 || shape.h == 0 || shape.w == 0) {
      throw ShapeError("tensor extents must be >= 1, got " + shape.str());
    }
    if (data_.size() != shape.numel()) {
      throw ShapeError("value count " + std::to_string(data_.size()) +
                       " does not match shape " + shape.str());
    }
  }

  Tensor4(std::size_t n, std::size_t c, std::size_t h, std::size_t w, T fill = T(0))
      : Tensor4(Shape4{n, c, h, w}, fill) {}

  static Tensor4 zeros_like(const Tensor4& t) { return Tensor4(t.shape()); }
  static Tensor4 ones_like(const Tensor4& t) { return Tensor4(t.shape(), T(1)); }

  const Shape4& shape() const noexcept { return shape_; }
  std::size_t n() const noexcept { return shape_.n; }
  std::size_t c() const noexcept { return shape_.c; }
  std::size_t h() const noexcept { return shape_.h; }
  std::size_t w() const noexcept { return shape_.w; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  /// Checked flat offset of element (i, j, y, x).
  std::size_t flat_index(std::size_t i, std::size_t j, std::size_t y, std::size_t x) const {
    if (i >= shape_.n) throw BoundsError("n", i, shape_.n);
    if (j >= shape_.c) throw BoundsError("c", j, shape_.c);
    if (y >= shape_.h) throw BoundsError("h", y, shape_.h);
    if (x >= shape_.w) throw BoundsError("w", x, shape_.w);
    return offset(i, j, y, x);
  }

  T& at(std::size_t i, std::size_t j, std::size_t y, std::size_t x) {
    return data_[flat_index(i, j, y, x)];
  }
  const T& at(std::size_t i, std::size_t j, std::size_t y, std::size_t x) const {
    return data_[flat_index(i, j, y, x)];
  }

  T& operator()(std::size_t i, std::size_t j, std::size_t y, std::size_t x) noexcept {
    return data_[offset(i, j, y, x)];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t y,
                      std::size_t x) const noexcept {
    return data_[offset(i, j, y, x)];
  }

  /// Start of the h*w slice for (batch i, channel j).
  T* plane(std::size_t i, std::size_t j) noexcept {
    return data_.data() + (i * shape_.c + j) * shape_.plane();
  }
  const T* plane(std::size_t i, std::size_t j) const noexcept {
    return data_.data() + (i * shape_.c + j) * shape_.plane();
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename U>
  Tensor4<U> cast() const {
    std::vector<U> out(data_.size());
    std::transform(data_.begin(), data_.end(), out.begin(),
                   [](T v) { return static_cast<U>(v); });
    return Tensor4<U>(shape_, std::move(out));
  }

  friend bool operator==(const Tensor4& a, const Tensor4& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::size_t offset(std::size_t i, std::size_t j, std::size_t y,
                     std::size_t x) const noexcept {
    return ((i * shape_.c + j) * shape_.h + y) * shape_.w + x;
  }

  Shape4 shape_;
  std::vector<T> data_;
};

inline void require_same_shape(const Shape4& a, const Shape4& b, const char* op) {
  if (!(a == b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.str() + " vs " + b.str());
  }
}

enum class ElementwiseOp { add, sub, mul };

template <typename T>
Tensor4<T> elementwise(const Tensor4<T>& a, const Tensor4<T>& b, ElementwiseOp op) {
  require_same_shape(a.shape(), b.shape(), "elementwise");
  Tensor4<T> out(a.shape());
  const auto av = a.data();
  const auto bv = b.data();
  auto ov = out.data();
  switch (op) {
    case ElementwiseOp::add:
      for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
      break;
    case ElementwiseOp::sub:
      for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
      break;
    case ElementwiseOp::mul:
      for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
      break;
  }
  return out;
}

template <typename T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b) {
  return elementwise(a, b, ElementwiseOp::add);
}
template <typename T>
Tensor4<T> sub(const Tensor4<T>& a, const Tensor4<T>& b) {
  return elementwise(a, b, ElementwiseOp::sub);
}
template <typename T>
Tensor4<T> mul(const Tensor4<T>& a, const Tensor4<T>& b) {
  return elementwise(a, b, ElementwiseOp::mul);
}

/// In-place a += b.
template <typename T>
void accumulate(Tensor4<T>& a, const Tensor4<T>& b) {
  require_same_shape(a.shape(), b.shape(), "accumulate");
  auto av = a.data();
  const auto bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += bv[i];
}

template <typename T>
Tensor4<T> scaled(const Tensor4<T>& a, T s) {
  Tensor4<T> out(a.shape());
  const auto av = a.data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * s;
  return out;
}

}  // namespace smx
