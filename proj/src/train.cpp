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

#include "smx/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smx/autodiff.hpp"
#include "smx/metrics.hpp"
#include "smx/ops.hpp"
#include "smx/spectral.hpp"

namespace smx::train {

TrainConfig TrainConfig::desk(std::size_t scale) {
  TrainConfig c;
  c.batch = 8;
  c.patch = 32;
  c.iters = 500;
  c.scale = scale;
  return c;
}

TrainConfig TrainConfig::full_protocol(std::size_t scale) {
  TrainConfig c;
  c.batch = 64;
  c.patch = 64;
  c.iters = 300000;
  c.scale = scale;
  return c;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (batch == 0) throw ConfigError("batch must be at least 1");
  if (patch == 0) throw ConfigError("patch must be at least 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (scale < 2 || scale > 4) throw ConfigError("scale must be 2, 3 or 4");
}

template <typename T>
void adam_step(ParamTree<T>& tree, const ParamTree<T>& grads, AdamState<T>& state,
               const TrainConfig& cfg) {
  if (grads.size() != tree.size()) {
    throw ShapeError("adam_step: gradient tree has " + std::to_string(grads.size()) +
                     " entries, parameters have " + std::to_string(tree.size()));
  }
  for (const auto& p : tree) {
    require_same_shape(p.value.shape(), grads.at(p.name).shape(), "adam_step");
    const auto it = state.moments.find(p.name);
    if (it != state.moments.end()) {
      require_same_shape(p.value.shape(), it->second.m.shape(), "adam_step moments");
    }
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& p : tree) {
    auto [it, fresh] = state.moments.try_emplace(p.name);
    if (fresh) {
      it->second.m = Tensor4<T>(p.value.shape());
      it->second.v = Tensor4<T>(p.value.shape());
    }
    auto m = it->second.m.data();
    auto v = it->second.v.data();
    auto w = p.value.data();
    const auto g = grads.at(p.name).data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = static_cast<double>(g[i]);
      const double mi = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * gi;
      const double vi = cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double step = cfg.lr * (mi / c1) / (std::sqrt(vi / c2) + cfg.adam_eps);
      w[i] = static_cast<T>(static_cast<double>(w[i]) - step);
    }
  }
}

Dataset Dataset::from_hr(std::vector<Tensor4<Real>> images, std::size_t scale) {
  if (scale == 0) throw ConfigError("scale must be positive");
  Dataset d;
  d.scale = scale;
  for (auto& img : images) {
    if (img.n() != 1 || img.c() != 3) throw ShapeError("dataset images must be (1,3,h,w)");
    const std::size_t h = img.h() / scale * scale;
    const std::size_t w = img.w() / scale * scale;
    if (h == 0 || w == 0) throw ConfigError("image smaller than the scale factor");
    Tensor4<Real> hr(1, 3, h, w);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) hr(0, c, y, x) = img(0, c, y, x);
      }
    }
    d.lr.push_back(ops::bicubic_resize(hr, 1.0 / static_cast<double>(scale)));
    d.hr.push_back(std::move(hr));
  }
  return d;
}

Tensor4<Real> augment(const Tensor4<Real>& patch, bool flip, std::size_t quarter_turns) {
  if (patch.h() != patch.w()) throw ShapeError("augment expects a square patch");
  const std::size_t p = patch.h();
  Tensor4<Real> cur = patch;
  if (flip) {
    for (std::size_t i = 0; i < cur.n(); ++i) {
      for (std::size_t c = 0; c < cur.c(); ++c) {
        for (std::size_t y = 0; y < p; ++y) {
          for (std::size_t x = 0; x < p; ++x) cur(i, c, y, x) = patch(i, c, y, p - 1 - x);
        }
      }
    }
  }
  for (std::size_t r = 0; r < quarter_turns % 4; ++r) {
    Tensor4<Real> next(cur.shape());
    for (std::size_t i = 0; i < cur.n(); ++i) {
      for (std::size_t c = 0; c < cur.c(); ++c) {
        for (std::size_t y = 0; y < p; ++y) {
          for (std::size_t x = 0; x < p; ++x) next(i, c, y, x) = cur(i, c, x, p - 1 - y);
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

namespace {

Tensor4<Real> crop(const Tensor4<Real>& img, std::size_t y0, std::size_t x0, std::size_t size) {
  Tensor4<Real> out(1, img.c(), size, size);
  for (std::size_t c = 0; c < img.c(); ++c) {
    for (std::size_t y = 0; y < size; ++y) {
      const Real* src = img.plane(0, c) + (y0 + y) * img.w() + x0;
      std::copy(src, src + size, out.plane(0, c) + y * size);
    }
  }
  return out;
}

void place(Tensor4<Real>& batch, std::size_t i, const Tensor4<Real>& item) {
  std::copy(item.data().begin(), item.data().end(), batch.plane(i, 0));
}

}  // namespace

Batch sample_batch(const Dataset& data, const TrainConfig& cfg, Rng& rng) {
  if (data.size() == 0) throw ConfigError("dataset is empty");
  if (cfg.batch == 0 || cfg.patch == 0) throw ConfigError("batch and patch must be positive");
  const std::size_t s = data.scale;
  for (const auto& img : data.lr) {
    if (img.h() < cfg.patch || img.w() < cfg.patch) {
      throw ConfigError("patch " + std::to_string(cfg.patch) + " exceeds LR image " +
                        std::to_string(img.h()) + "x" + std::to_string(img.w()));
    }
  }
  Batch b{Tensor4<Real>(cfg.batch, 3, cfg.patch, cfg.patch),
          Tensor4<Real>(cfg.batch, 3, cfg.patch * s, cfg.patch * s),
          {}};
  for (std::size_t i = 0; i < cfg.batch; ++i) {
    PatchDraw d;
    d.image = rng.below(data.size());
    const auto& lr = data.lr[d.image];
    d.lr_y = rng.below(lr.h() - cfg.patch + 1);
    d.lr_x = rng.below(lr.w() - cfg.patch + 1);
    d.flip = rng.bernoulli(0.5);
    d.quarter_turns = rng.below(4);
    place(b.lr, i, augment(crop(lr, d.lr_y, d.lr_x, cfg.patch), d.flip, d.quarter_turns));
    place(b.hr, i,
          augment(crop(data.hr[d.image], d.lr_y * s, d.lr_x * s, cfg.patch * s), d.flip,
                  d.quarter_turns));
    b.draws.push_back(d);
  }
  return b;
}

template <typename T>
T loss_and_grads(const ParamTree<T>& tree, const model::ModelConfig& cfg, const Tensor4<T>& lr,
                 const Tensor4<T>& hr, T lambda, ParamTree<T>* grads) {
  Tape<T> tape(tree);
  const auto x = tape.constant(lr);
  const auto sr = model::forward(tape, cfg, x);
  const auto gt = tape.constant(hr);
  auto total = tape.l1_loss(sr, gt);
  if (lambda != T(0)) total = tape.weighted_sum(total, tape.frequency_loss(sr, gt), lambda);
  const T value = tape.value(total).data()[0];
  if (grads != nullptr) *grads = tape.gradients(total);
  return value;
}

TrainResult train_loop(const model::ModelConfig& cfg, const TrainConfig& tcfg,
                       const Dataset& data, const CheckpointFn& on_checkpoint) {
  return train_loop(model::build(cfg, tcfg.seed), cfg, tcfg, data, on_checkpoint);
}

TrainResult train_loop(ParamTree<Real> initial, const model::ModelConfig& cfg,
                       const TrainConfig& tcfg, const Dataset& data,
                       const CheckpointFn& on_checkpoint) {
  cfg.validate();
  tcfg.validate();
  model::check_tree(initial, cfg);
  if (tcfg.scale != cfg.scale || data.scale != cfg.scale) {
    throw ConfigError("training scale, model scale and dataset scale must agree");
  }
  if (data.size() == 0) throw ConfigError("dataset is empty");
  TrainResult result{std::move(initial), {}};
  AdamState<Real> state;
  Rng rng(Rng::mix(tcfg.seed, Rng::hash("sampler")));
  const Real lambda = static_cast<Real>(tcfg.lambda);
  for (std::size_t step = 0; step < tcfg.iters; ++step) {
    const Batch b = sample_batch(data, tcfg, rng);
    ParamTree<Real> grads;
    const Real loss = loss_and_grads(result.tree, cfg, b.lr, b.hr, lambda, &grads);
    adam_step(result.tree, grads, state, tcfg);
    result.losses.push_back(static_cast<double>(loss));
    if (on_checkpoint && tcfg.checkpoint_every != 0 && (step + 1) % tcfg.checkpoint_every == 0) {
      on_checkpoint(step + 1, result.tree);
    }
  }
  return result;
}

namespace {

/// Smallest |component| over every spectral bin of d, skipping imaginary
/// parts that vanish by conjugate symmetry.
double min_spectral_magnitude(const Tensor4<double>& d) {
  const auto f = spectral::fft2d(d);
  const std::size_t h = d.h();
  const std::size_t w = d.w();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < d.n() * d.c(); ++s) {
    for (std::size_t u = 0; u < h; ++u) {
      for (std::size_t v = 0; v < w; ++v) {
        const std::size_t k = s * h * w + u * w + v;
        best = std::min(best, std::abs(f.re.data()[k]));
        const bool self_conjugate = (h - u) % h == u && (w - v) % w == v;
        if (!self_conjugate) best = std::min(best, std::abs(f.im.data()[k]));
      }
    }
  }
  return best;
}

}  // namespace

GradCheckResult grad_check(const model::ModelConfig& cfg, double eps, std::uint64_t seed,
                           double lambda) {
  cfg.validate();
  ParamTree<double> tree = model::build(cfg, seed).cast<double>();
  Rng rng(Rng::mix(seed, Rng::hash("grad_check")));
  Tensor4<double> lr(1, 3, 8, 8);
  for (auto& v : lr.data()) v = rng.uniform01();
  const Tensor4<double> sr0 = model::forward(tree, cfg, lr);

  Tensor4<double> gt(sr0.shape());
  for (int attempt = 0;; ++attempt) {
    for (std::size_t i = 0; i < gt.size(); ++i) {
      const double mag = rng.uniform(0.05, 0.15);
      gt.data()[i] = sr0.data()[i] + (rng.bernoulli(0.5) ? mag : -mag);
    }
    if (min_spectral_magnitude(sub(sr0, gt)) >= 1e-3 || attempt >= 1000) break;
  }

  ParamTree<double> grads;
  loss_and_grads(tree, cfg, lr, gt, lambda, &grads);

  GradCheckResult r;
  r.tensors = tree.size();
  for (auto& p : tree) {
    const auto g = grads.at(p.name).data();
    auto w = p.value.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + eps;
      const double up = total_loss(model::forward(tree, cfg, lr), gt, lambda);
      w[i] = saved - eps;
      const double down = total_loss(model::forward(tree, cfg, lr), gt, lambda);
      w[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double denom = std::max({std::abs(numeric), std::abs(g[i]), 1e-6});
      const double rel = std::abs(numeric - g[i]) / denom;
      if (rel > r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst_param = p.name + "[" + std::to_string(i) + "]";
      }
      ++r.checked;
    }
  }
  return r;
}

Tensor4<Real> synthetic_image(std::uint64_t seed, std::size_t size) {
  if (size == 0) throw ConfigError("image size must be positive");
  Rng rng(Rng::mix(seed, Rng::hash("synthetic_image")));
  const double n = static_cast<double>(size);
  Tensor4<double> img(1, 3, size, size);
  for (std::size_t c = 0; c < 3; ++c) {
    const double base = rng.uniform(0.2, 0.8);
    const double gx = rng.uniform(-0.3, 0.3);
    const double gy = rng.uniform(-0.3, 0.3);
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        img(0, c, y, x) = base + gx * (static_cast<double>(x) / n - 0.5) +
                          gy * (static_cast<double>(y) / n - 0.5);
      }
    }
  }
  const std::size_t stripes = 1 + rng.below(2);
  for (std::size_t k = 0; k < stripes; ++k) {
    const double fx = rng.uniform(1.0, 8.0);
    const double fy = rng.uniform(-8.0, 8.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double amp[3];
    for (auto& a : amp) a = rng.uniform(-0.15, 0.15);
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        const double t = 2.0 * std::numbers::pi *
                             (fx * static_cast<double>(x) + fy * static_cast<double>(y)) / n +
                         phase;
        const double s = std::sin(t);
        for (std::size_t c = 0; c < 3; ++c) img(0, c, y, x) += amp[c] * s;
      }
    }
  }
  const std::size_t shapes = 3 + rng.below(4);
  for (std::size_t k = 0; k < shapes; ++k) {
    double color[3];
    for (auto& v : color) v = rng.uniform01();
    const double cy = rng.uniform(0.0, n);
    const double cx = rng.uniform(0.0, n);
    const double ry = rng.uniform(n / 12.0, n / 4.0);
    const double rx = rng.uniform(n / 12.0, n / 4.0);
    const bool disc = rng.bernoulli(0.5);
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        const double dy = (static_cast<double>(y) - cy) / ry;
        const double dx = (static_cast<double>(x) - cx) / rx;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (!inside) continue;
        for (std::size_t c = 0; c < 3; ++c) img(0, c, y, x) = color[c];
      }
    }
  }
  for (auto& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img.cast<Real>();
}

double dataset_psnr(const ParamTree<Real>& tree, const model::ModelConfig& cfg,
                    const Dataset& data) {
  if (data.size() == 0) throw ConfigError("dataset is empty");
  metrics::EvalProtocol proto;
  proto.shave = cfg.scale;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Tensor4<Real> sr = model::forward(tree, cfg, data.lr[i]);
    for (auto& v : sr.data()) v = std::clamp(v, Real(0), Real(1));
    sum += metrics::psnr(metrics::rgb_to_y(sr), metrics::rgb_to_y(data.hr[i]), proto);
  }
  return sum / static_cast<double>(data.size());
}

template void adam_step<float>(ParamTree<float>&, const ParamTree<float>&, AdamState<float>&,
                               const TrainConfig&);
template void adam_step<double>(ParamTree<double>&, const ParamTree<double>&, AdamState<double>&,
                                const TrainConfig&);
template float loss_and_grads<float>(const ParamTree<float>&, const model::ModelConfig&,
                                     const Tensor4<float>&, const Tensor4<float>&, float,
                                     ParamTree<float>*);
template double loss_and_grads<double>(const ParamTree<double>&, const model::ModelConfig&,
                                       const Tensor4<double>&, const Tensor4<double>&, double,
                                       ParamTree<double>*);

}  // namespace smx::train
