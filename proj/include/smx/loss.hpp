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

#include "smx/tensor.hpp"

namespace smx::train {

/// Mean absolute difference.
template <typename T>
T l1_loss(const Tensor4<T>& sr, const Tensor4<T>& gt);

/// d(cotangent * l1_loss)/d sr; the subgradient at a zero difference is 0.
template <typename T>
Tensor4<T> l1_loss_vjp(const Tensor4<T>& sr, const Tensor4<T>& gt, T cotangent);

/// l1_loss + lambda * spectral::frequency_loss.
template <typename T>
T total_loss(const Tensor4<T>& sr, const Tensor4<T>& gt, T lambda);

}  // namespace smx::train
