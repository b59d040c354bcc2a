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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "smx/loss.hpp"
#include "smx/model.hpp"
#include "smx/rng.hpp"

namespace smx::train {

struct TrainConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch = 8;   // patches per step
  std::size_t patch = 64;  // LR patch side
  std::size_t iters = 0;
  double lambda = 0.1;
  std::uint64_t seed = 0;
  std::size_t scale = 4;
  /// Steps between checkpoint callbacks; 0 disables them.
  std::size_t checkpoint_every = 0;

  /// batch 8, patch 32, 500 steps.
  static TrainConfig desk(std::size_t scale);
  /// batch 64, patch 64, 300000 steps.
  static TrainConfig full_protocol(std::size_t scale);

  void validate() const;
};

template <typename T>
struct AdamState {
  struct Moments {
    Tensor4<T> m;
    Tensor4<T> v;
  };
  std::map<std::string, Moments> moments;
  std::uint64_t t = 0;
};

/// One bias-corrected Adam update of every parameter in `tree`, matching
/// gradients and moments by name. Missing moments start at zero.
template <typename T>
void adam_step(ParamTree<T>& tree, const ParamTree<T>& grads, AdamState<T>& state,
               const TrainConfig& cfg);

/// HR images with their bicubic LR counterparts.
struct Dataset {
  std::size_t scale = 1;
  std::vector<Tensor4<Real>> hr;
  std::vector<Tensor4<Real>> lr;

  /// Crops each image to a multiple of scale (top-left anchored) and
  /// derives LR by bicubic downscaling.
  static Dataset from_hr(std::vector<Tensor4<Real>> images, std::size_t scale);

  std::size_t size() const noexcept { return hr.size(); }
};

/// Where one training pair came from and how it was transformed.
struct PatchDraw {
  std::size_t image = 0;
  std::size_t lr_y = 0;
  std::size_t lr_x = 0;
  bool flip = false;
  /// Counter-clockwise quarter turns, 0..3.
  std::size_t quarter_turns = 0;
};

struct Batch {
  Tensor4<Real> lr;
  Tensor4<Real> hr;
  std::vector<PatchDraw> draws;
};

/// Draws cfg.batch aligned patches. Each draw consumes, in order: image
/// index, crop row, crop column, flip, quarter turns.
Batch sample_batch(const Dataset& data, const TrainConfig& cfg, Rng& rng);

/// Horizontal flip (when flip) followed by quarter_turns counter-clockwise
/// rotations of a square patch, applied to every channel.
Tensor4<Real> augment(const Tensor4<Real>& patch, bool flip, std::size_t quarter_turns);

struct TrainResult {
  ParamTree<Real> tree;
  std::vector<double> losses;
};

using CheckpointFn = std::function<void(std::size_t step, const ParamTree<Real>& tree)>;

/// Loss and parameter gradients of total_loss(forward(lr), hr, lambda).
template <typename T>
T loss_and_grads(const ParamTree<T>& tree, const model::ModelConfig& cfg, const Tensor4<T>& lr,
                 const Tensor4<T>& hr, T lambda, ParamTree<T>* grads);

/// Starts from build(cfg, tcfg.seed).
TrainResult train_loop(const model::ModelConfig& cfg, const TrainConfig& tcfg,
                       const Dataset& data, const CheckpointFn& on_checkpoint = {});

TrainResult train_loop(ParamTree<Real> initial, const model::ModelConfig& cfg,
                       const TrainConfig& tcfg, const Dataset& data,
                       const CheckpointFn& on_checkpoint = {});

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t checked = 0;
  std::size_t tensors = 0;
};

/// Central-difference check of every parameter gradient of total_loss in
/// double precision on a random 8x8 input. The target is the initial
/// prediction plus a random offset of magnitude 0.05..0.15 per pixel,
/// redrawn until every spectral difference is at least 1e-3 away from zero,
/// so no finite-difference step straddles a kink of either loss term.
GradCheckResult grad_check(const model::ModelConfig& cfg, double eps = 1e-5,
                           std::uint64_t seed = 1, double lambda = 0.1);

/// 96x96 (by default) RGB scene of gradients, stripes, rectangles and discs.
Tensor4<Real> synthetic_image(std::uint64_t seed, std::size_t size = 96);

/// Mean luma PSNR of forward(tree, lr) against hr over the dataset with
/// shave = scale.
double dataset_psnr(const ParamTree<Real>& tree, const model::ModelConfig& cfg,
                    const Dataset& data);

}  // namespace smx::train
