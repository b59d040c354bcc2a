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

// Serial, element-at-a-time versions of the parallel kernels in smx/ops.hpp.
// They are kept deliberately naive: tests use them as oracles and the
// benchmark uses them as the baseline.

#pragma once

#include "smx/ops.hpp"

namespace smx::reference {

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ops::ConvWeight<T>& w);

template <typename T>
ops::ConvGrads<T> conv2d_vjp(const Tensor4<T>& x, const ops::ConvWeight<T>& w,
                             const Tensor4<T>& dy);

template <typename T>
Tensor4<T> layer_norm_channels(const Tensor4<T>& x, const ops::NormWeight<T>& w);

}  // namespace smx::reference
