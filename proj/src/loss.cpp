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

#include "smx/loss.hpp"

#include <cmath>

#include "smx/spectral.hpp"

namespace smx::train {

template <typename T>
T l1_loss(const Tensor4<T>& sr, const Tensor4<T>& gt) {
  require_same_shape(sr.shape(), gt.shape(), "l1_loss");
  const auto a = sr.data();
  const auto b = gt.data();
  T acc = T(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<T>(a.size());
}

template <typename T>
Tensor4<T> l1_loss_vjp(const Tensor4<T>& sr, const Tensor4<T>& gt, T cotangent) {
  require_same_shape(sr.shape(), gt.shape(), "l1_loss_vjp");
  Tensor4<T> g(sr.shape());
  const auto a = sr.data();
  const auto b = gt.data();
  auto d = g.data();
  const T step = cotangent / static_cast<T>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const T diff = a[i] - b[i];
    d[i] = diff > T(0) ? step : (diff < T(0) ? -step : T(0));
  }
  return g;
}

template <typename T>
T total_loss(const Tensor4<T>& sr, const Tensor4<T>& gt, T lambda) {
  require_same_shape(sr.shape(), gt.shape(), "total_loss");
  const T pixel = l1_loss(sr, gt);
  if (lambda == T(0)) return pixel;
  return pixel + lambda * spectral::frequency_loss(sr, gt);
}

template float l1_loss<float>(const Tensor4<float>&, const Tensor4<float>&);
template double l1_loss<double>(const Tensor4<double>&, const Tensor4<double>&);
template Tensor4<float> l1_loss_vjp<float>(const Tensor4<float>&, const Tensor4<float>&, float);
template Tensor4<double> l1_loss_vjp<double>(const Tensor4<double>&, const Tensor4<double>&,
                                             double);
template float total_loss<float>(const Tensor4<float>&, const Tensor4<float>&, float);
template double total_loss<double>(const Tensor4<double>&, const Tensor4<double>&, double);

}  // namespace smx::train
