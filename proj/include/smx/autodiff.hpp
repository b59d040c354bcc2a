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

// Two executors for the same network description.
//
// Eager evaluates operators immediately and keeps nothing. Tape records each
// operator with its inputs so a single reverse sweep can produce parameter
// gradients. Both resolve weights by canonical name prefix in a ParamTree:
// a conv at "x.y" reads "x.y.coeffs" and "x.y.bias"; a norm reads "x.y.gamma".
// Group count of a conv is inferred as input channels / coeffs.c().

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smx/loss.hpp"
#include "smx/ops.hpp"
#include "smx/param_tree.hpp"
#include "smx/spectral.hpp"

namespace smx {

inline constexpr double kNormEps = 1e-6;

template <typename T>
class Eager {
 public:
  using Var = Tensor4<T>;

  explicit Eager(const ParamTree<T>& params) : params_(params) {}

  Var conv(const Var& x, const std::string& prefix) const {
    const Tensor4<T>& coeffs = params_.at(prefix + ".coeffs");
    const ops::ConvWeight<T> w{coeffs, params_.at(prefix + ".bias").data(), groups_for(x, coeffs)};
    if (coeffs.c() == 1 && x.c() > 1) return ops::depthwise_conv2d(x, w);
    return ops::conv2d(x, w);
  }
  Var norm(const Var& x, const std::string& prefix) const {
    return ops::layer_norm_channels(
        x, ops::NormWeight<T>{params_.at(prefix + ".gamma").data(), static_cast<T>(kNormEps)});
  }
  Var silu(const Var& x) const { return ops::silu(x); }
  std::pair<Var, Var> split(const Var& x) const { return ops::channel_split(x); }
  Var concat(const Var& a, const Var& b) const { return ops::channel_concat(a, b); }
  Var shuffle(const Var& x, std::size_t groups) const { return ops::channel_shuffle(x, groups); }
  Var add(const Var& a, const Var& b) const { return smx::add(a, b); }
  Var pixel_shuffle(const Var& x, std::size_t r) const { return ops::pixel_shuffle(x, r); }
  Var bilinear(const Var& x, std::size_t s) const { return ops::bilinear_resize(x, s); }

 private:
  static std::size_t groups_for(const Var& x, const Tensor4<T>& coeffs) {
    return coeffs.c() == 0 || x.c() % coeffs.c() != 0 ? 1 : x.c() / coeffs.c();
  }
  const ParamTree<T>& params_;
};

template <typename T>
class Tape {
 public:
  using Var = std::size_t;

  explicit Tape(const ParamTree<T>& params)
      : params_(params), param_grads_(params.zeros_like()) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// A leaf that never receives a gradient (inputs, targets).
  Var constant(Tensor4<T> value) { return push(std::move(value), false, nullptr); }

  const Tensor4<T>& value(Var v) const { return nodes_.at(v).value; }
  std::size_t size() const noexcept { return nodes_.size(); }

  Var conv(Var x, const std::string& prefix) {
    const std::size_t ci = params_.index_of(prefix + ".coeffs");
    const std::size_t bi = params_.index_of(prefix + ".bias");
    const Tensor4<T>& coeffs = params_[ci].value;
    const Tensor4<T>& xv = value(x);
    const std::size_t groups =
        coeffs.c() == 0 || xv.c() % coeffs.c() != 0 ? 1 : xv.c() / coeffs.c();
    const ops::ConvWeight<T> w{coeffs, params_[bi].value.data(), groups};
    Tensor4<T> out = coeffs.c() == 1 && xv.c() > 1 ? ops::depthwise_conv2d(xv, w) : ops::conv2d(xv, w);
    return push(std::move(out), true, [this, x, ci, bi, groups](const Tensor4<T>& dy) {
      const ops::ConvWeight<T> w{params_[ci].value, params_[bi].value.data(), groups};
      ops::ConvGrads<T> g = ops::conv2d_vjp(value(x), w, dy);
      accumulate(param_grads_[ci].value, g.coeffs);
      auto db = param_grads_[bi].value.data();
      for (std::size_t o = 0; o < db.size(); ++o) db[o] += g.bias[o];
      push_grad(x, std::move(g.input));
    });
  }

  Var norm(Var x, const std::string& prefix) {
    const std::size_t gi = params_.index_of(prefix + ".gamma");
    const ops::NormWeight<T> w{params_[gi].value.data(), static_cast<T>(kNormEps)};
    Tensor4<T> out = ops::layer_norm_channels(value(x), w);
    return push(std::move(out), true, [this, x, gi](const Tensor4<T>& dy) {
      const ops::NormWeight<T> w{params_[gi].value.data(), static_cast<T>(kNormEps)};
      ops::NormGrads<T> g = ops::layer_norm_vjp(value(x), w, dy);
      auto dg = param_grads_[gi].value.data();
      for (std::size_t c = 0; c < dg.size(); ++c) dg[c] += g.gamma[c];
      push_grad(x, std::move(g.input));
    });
  }

  Var silu(Var x) {
    return unary(x, ops::silu(value(x)),
                 [this, x](const Tensor4<T>& dy) { push_grad(x, ops::silu_vjp(value(x), dy)); });
  }

  std::pair<Var, Var> split(Var x) {
    auto [a, b] = ops::channel_split(value(x));
    const Shape4 half = a.shape();
    const Var va = unary(x, std::move(a), [this, x, half](const Tensor4<T>& dy) {
      push_grad(x, ops::channel_concat(dy, Tensor4<T>(half)));
    });
    const Var vb = unary(x, std::move(b), [this, x, half](const Tensor4<T>& dy) {
      push_grad(x, ops::channel_concat(Tensor4<T>(half), dy));
    });
    return {va, vb};
  }

  Var concat(Var a, Var b) {
    Tensor4<T> out = ops::channel_concat(value(a), value(b));
    return push(std::move(out), needs(a) || needs(b), [this, a, b](const Tensor4<T>& dy) {
      const std::size_t ca = value(a).c();
      Tensor4<T> da(value(a).shape());
      Tensor4<T> db(value(b).shape());
      for (std::size_t i = 0; i < dy.n(); ++i) {
        for (std::size_t j = 0; j < dy.c(); ++j) {
          const T* src = dy.plane(i, j);
          T* dst = j < ca ? da.plane(i, j) : db.plane(i, j - ca);
          std::copy(src, src + dy.shape().plane(), dst);
        }
      }
      push_grad(a, std::move(da));
      push_grad(b, std::move(db));
    });
  }

  Var shuffle(Var x, std::size_t groups) {
    const std::size_t c = value(x).c();
    return unary(x, ops::channel_shuffle(value(x), groups),
                 [this, x, c, groups](const Tensor4<T>& dy) {
                   push_grad(x, ops::channel_shuffle(dy, c / groups));
                 });
  }

  Var add(Var a, Var b) {
    return push(smx::add(value(a), value(b)), needs(a) || needs(b),
                [this, a, b](const Tensor4<T>& dy) {
                  push_grad(a, dy);
                  push_grad(b, dy);
                });
  }

  Var pixel_shuffle(Var x, std::size_t r) {
    return unary(x, ops::pixel_shuffle(value(x), r), [this, x, r](const Tensor4<T>& dy) {
      push_grad(x, ops::pixel_unshuffle(dy, r));
    });
  }

  Var bilinear(Var x, std::size_t s) {
    const Shape4 in = value(x).shape();
    return unary(x, ops::bilinear_resize(value(x), s), [this, x, in, s](const Tensor4<T>& dy) {
      push_grad(x, ops::bilinear_resize_vjp(in, s, dy));
    });
  }

  Var l1_loss(Var sr, Var gt) {
    Tensor4<T> out(Shape4{}, train::l1_loss(value(sr), value(gt)));
    return push(std::move(out), needs(sr) || needs(gt), [this, sr, gt](const Tensor4<T>& dy) {
      Tensor4<T> g = train::l1_loss_vjp(value(sr), value(gt), dy.data()[0]);
      if (needs(gt)) push_grad(gt, scaled(g, T(-1)));
      push_grad(sr, std::move(g));
    });
  }

  Var frequency_loss(Var sr, Var gt) {
    Tensor4<T> out(Shape4{}, spectral::frequency_loss(value(sr), value(gt)));
    return push(std::move(out), needs(sr) || needs(gt), [this, sr, gt](const Tensor4<T>& dy) {
      Tensor4<T> g = spectral::frequency_loss_vjp(value(sr), value(gt), dy.data()[0]);
      if (needs(gt)) push_grad(gt, scaled(g, T(-1)));
      push_grad(sr, std::move(g));
    });
  }

  /// a + weight * b for scalar nodes.
  Var weighted_sum(Var a, Var b, T weight) {
    Tensor4<T> out(Shape4{}, value(a).data()[0] + weight * value(b).data()[0]);
    return push(std::move(out), needs(a) || needs(b), [this, a, b, weight](const Tensor4<T>& dy) {
      push_grad(a, dy);
      push_grad(b, scaled(dy, weight));
    });
  }

  /// Reverse sweep from a scalar node; returns d root / d parameter for
  /// every entry of the bound ParamTree. May be called once per tape.
  ParamTree<T> gradients(Var root) {
    if (value(root).size() != 1) {
      throw ShapeError("Tape::gradients: root must be a scalar, got " + value(root).shape().str());
    }
    grads_.assign(nodes_.size(), std::nullopt);
    grads_[root] = Tensor4<T>(Shape4{}, T(1));
    for (std::size_t v = root + 1; v-- > 0;) {
      if (!grads_[v] || !nodes_[v].backward) continue;
      const Tensor4<T> g = std::move(*grads_[v]);
      grads_[v].reset();
      nodes_[v].backward(g);
    }
    return std::move(param_grads_);
  }

 private:
  struct Node {
    Tensor4<T> value;
    bool requires_grad;
    std::function<void(const Tensor4<T>&)> backward;
  };

  bool needs(Var v) const { return nodes_.at(v).requires_grad; }

  Var push(Tensor4<T> value, bool requires_grad, std::function<void(const Tensor4<T>&)> back) {
    nodes_.push_back(Node{std::move(value), requires_grad, requires_grad ? std::move(back) : nullptr});
    return nodes_.size() - 1;
  }

  template <typename F>
  Var unary(Var x, Tensor4<T> out, F&& back) {
    return push(std::move(out), needs(x), std::forward<F>(back));
  }

  void push_grad(Var v, Tensor4<T> g) {
    if (!needs(v)) return;
    if (grads_[v]) {
      accumulate(*grads_[v], g);
    } else {
      grads_[v] = std::move(g);
    }
  }

  const ParamTree<T>& params_;
  ParamTree<T> param_grads_;
  std::vector<Node> nodes_;
  std::vector<std::optional<Tensor4<T>>> grads_;
};

}  // namespace smx
