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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smx/complexity.hpp"
#include "smx/metrics.hpp"
#include "smx/model.hpp"
#include "smx/ops.hpp"
#include "smx/spectral.hpp"
#include "smx/train.hpp"
#include "smx/weights_io.hpp"
#include "support.hpp"

using namespace smx;
using model::Fusion;
using model::ModelConfig;
using model::Variant;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool within(double value, double target, double rel_tol) {
  return std::abs(value - target) <= rel_tol * std::abs(target);
}

ModelConfig standard_kernel(std::size_t scale, std::size_t channels, std::size_t kernel) {
  ModelConfig c = ModelConfig::standard(scale);
  c.channels = channels;
  c.dw_kernel = kernel;
  return c;
}

void params_table(Verdict& v) {
  const double full[] = {394, 415, 411};
  const double tiny[] = {108, 114, 113};
  for (std::size_t s = 2; s <= 4; ++s) {
    for (const auto& [cfg, target] : {std::pair{ModelConfig::standard(s), full[s - 2]},
                                      std::pair{ModelConfig::tiny(s), tiny[s - 2]}}) {
      const auto p = complexity::count_params(cfg);
      v.detail << " " << (cfg.channels == 64 ? "full" : "tiny") << "x" << s << "="
               << complexity::display_params(p);
      v.require(within(static_cast<double>(p) / 1e3, target, 0.01),
                "params within 1% of " + std::to_string(static_cast<int>(target)) + "K");
      v.require(p == model::build(cfg, 0).scalar_count(), "count equals tree size");
    }
  }
}

void kernel_sweep(Verdict& v) {
  const std::size_t ks[] = {3, 5, 7, 9, 11, 13};
  const double targets[] = {113, 118, 125, 136, 148, 164};
  for (std::size_t i = 0; i < 6; ++i) {
    auto cfg = ModelConfig::tiny(4);
    cfg.dw_kernel = ks[i];
    const auto p = complexity::count_params(cfg);
    v.detail << " k" << ks[i] << "=" << complexity::display_params(p);
    v.require(within(static_cast<double>(p) / 1e3, targets[i], 0.01), "k=" + std::to_string(ks[i]));
  }
}

void ablation_table(Verdict& v) {
  struct Row {
    const char* name;
    Variant variant;
    Fusion fusion;
    double params_k;
    double params_tol;
    double macs_g;
  };
  const Row rows[] = {
      {"baseline", Variant::convmixer_baseline, Fusion::none, 55.9, 0.02, 5.2},
      {"css", Variant::css, Fusion::none, 24.7, 0.02, 3.2},
      {"cdc", Variant::cdc, Fusion::none, 35.5, 0.01, 3.8},
      {"conv", Variant::cdc, Fusion::conv, 81.7, 0.01, 6.9},
      {"s_conv", Variant::cdc, Fusion::s_conv, 81.7, 0.01, 6.9},
      {"c_conv", Variant::cdc, Fusion::c_conv, 128, 0.01, 9.9},
      {"s_resblock", Variant::cdc, Fusion::s_resblock, 128, 0.01, 9.9},
      {"s_fmbconv", Variant::cdc, Fusion::s_fmbconv, 113, 0.01, 8.9},
  };
  for (const auto& r : rows) {
    const auto cfg = ModelConfig::ablation(r.variant, r.fusion);
    const auto rep = complexity::analyze(cfg, 256, 256);
    v.detail << " " << r.name << "=" << complexity::display_params(rep.total_params) << "/"
             << complexity::display_macs(rep.total_macs);
    v.require(within(static_cast<double>(rep.total_params) / 1e3, r.params_k, r.params_tol),
              std::string(r.name) + " params");
    v.require(within(static_cast<double>(rep.total_macs) / 1e9, r.macs_g, 0.04),
              std::string(r.name) + " MACs");
  }
}

void hd_macs(Verdict& v) {
  const double full[] = {91, 43, 28};
  const double tiny[] = {25, 12, 8};
  for (std::size_t s = 2; s <= 4; ++s) {
    const auto [h, w] = complexity::hd_lr_size(s);
    for (const auto& [cfg, target] : {std::pair{ModelConfig::standard(s), full[s - 2]},
                                      std::pair{ModelConfig::tiny(s), tiny[s - 2]}}) {
      const auto m = complexity::count_macs(cfg, h, w);
      v.detail << " " << (cfg.channels == 64 ? "full" : "tiny") << "x" << s << "="
               << complexity::display_macs(m);
      v.require(within(static_cast<double>(m) / 1e9, target, 0.04),
                "MACs within 4% of " + std::to_string(static_cast<int>(target)) + "G");
    }
  }
}

void gradients(Verdict& v) {
  auto cfg = ModelConfig::tiny(2);
  cfg.channels = 8;
  cfg.n_fmb = 1;
  const auto r = train::grad_check(cfg);
  const auto tensors = model::build(cfg, 0).size();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r.max_rel_error);
  v.detail << " max_rel=" << buf << " at " << r.worst_param << ", " << r.checked << " scalars in "
           << r.tensors << "/" << tensors << " tensors";
  v.require(r.max_rel_error < 1e-4, "relative error below 1e-4");
  v.require(r.tensors == tensors, "every tensor checked");
}

void fft(Verdict& v) {
  const std::pair<std::size_t, std::size_t> sizes[] = {{4, 4}, {8, 8}, {7, 12}, {13, 5}};
  std::uint64_t seed = 100;
  double worst_dft = 0, worst_parseval = 0, worst_round = 0;
  for (const auto& [h, w] : sizes) {
    const auto x = smx::testing::random_tensor<double>({1, 1, h, w}, ++seed);
    const auto X = spectral::fft2d(x);
    const auto oracle = smx::testing::naive_dft2(x.data().data(), h, w);
    double scale = 0, err = 0, energy_x = 0, energy_f = 0;
    for (std::size_t i = 0; i < h * w; ++i) {
      const std::complex<double> got(X.re.data()[i], X.im.data()[i]);
      scale = std::max(scale, std::abs(oracle[i]));
      err = std::max(err, std::abs(got - oracle[i]));
      energy_x += x.data()[i] * x.data()[i];
      energy_f += std::norm(got);
    }
    worst_dft = std::max(worst_dft, err / scale);
    worst_parseval = std::max(
        worst_parseval, std::abs(energy_f - static_cast<double>(h * w) * energy_x) / energy_f);
    const auto back = spectral::ifft2d(X);
    worst_round = std::max(worst_round, smx::testing::max_abs_diff(back.re, x));
    double imag = 0;
    for (double b : back.im.data()) imag = std::max(imag, std::abs(b));
    worst_round = std::max(worst_round, imag);
  }
  v.detail << " dft=" << worst_dft << " parseval=" << worst_parseval << " roundtrip=" << worst_round;
  v.require(worst_dft <= 1e-10, "matches naive DFT");
  v.require(worst_parseval <= 1e-9, "Parseval");
  v.require(worst_round <= 1e-9, "round trip");
}

void identities(Verdict& v) {
  double worst = 0;
  std::uint64_t seed = 0;
  for (std::size_t s = 2; s <= 4; ++s) {
    for (const auto& cfg : {ModelConfig::tiny(s),
                            ModelConfig::ablation(Variant::css, Fusion::none),
                            ModelConfig::ablation(Variant::convmixer_baseline, Fusion::none)}) {
      auto c = cfg;
      c.scale = s;
      auto tree = model::build(c, ++seed);
      tree.at("tail.conv_out.coeffs").fill(0);
      tree.at("tail.conv_out.bias").fill(0);
      const auto lr = smx::testing::random_tensor<Real>({1, 3, 11, 9}, seed, 0.0, 1.0);
      worst = std::max(worst, smx::testing::max_abs_diff(model::forward(tree, c, lr),
                                                         ops::bilinear_resize(lr, s)));
    }
  }
  v.detail << " zero-tail vs bilinear=" << worst;
  v.require(worst <= 1e-6, "zero output conv gives bilinear");

  bool shuffle_ok = true;
  for (std::size_t r = 2; r <= 4; ++r) {
    const auto x = smx::testing::random_tensor<double>({2, 3 * r * r, 5, 4}, r);
    shuffle_ok = shuffle_ok && ops::pixel_unshuffle(ops::pixel_shuffle(x, r), r) == x;
    const auto y = smx::testing::random_tensor<double>({1, 3, 5 * r, 4 * r}, 10 + r);
    shuffle_ok = shuffle_ok && ops::pixel_shuffle(ops::pixel_unshuffle(y, r), r) == y;
  }
  v.require(shuffle_ok, "pixel shuffle round trip");

  bool channel_ok = true;
  for (std::size_t c : {4, 6, 8, 16, 64}) {
    const auto x = smx::testing::random_tensor<float>({2, c, 3, 3}, c);
    const auto once = ops::channel_shuffle(x, 2);
    channel_ok = channel_ok && ops::channel_shuffle(once, c / 2) == x;
    channel_ok = channel_ok && (c == 2 || !(once == x));
  }
  v.require(channel_ok, "channel shuffle inverse");
  v.detail << " pixel_shuffle=" << (shuffle_ok ? "exact" : "mismatch")
           << " channel_shuffle=" << (channel_ok ? "exact" : "mismatch");
}

void convergence(Verdict& v) {
  auto cfg = ModelConfig::tiny(2);
  cfg.channels = 16;
  cfg.dw_kernel = 3;
  cfg.n_fmb = 1;
  train::TrainConfig tcfg = train::TrainConfig::desk(2);
  tcfg.batch = 4;
  tcfg.patch = 32;
  tcfg.iters = 300;
  tcfg.lr = 5e-4;
  tcfg.lambda = 0.1;
  tcfg.seed = 7;
  std::vector<Tensor4<Real>> images;
  for (std::uint64_t i = 0; i < 16; ++i) images.push_back(train::synthetic_image(Rng::mix(tcfg.seed, i), 96));
  const auto data = train::Dataset::from_hr(std::move(images), 2);

  const double before = train::dataset_psnr(model::build(cfg, tcfg.seed), cfg, data);
  const auto result = train::train_loop(cfg, tcfg, data);
  const double after = train::dataset_psnr(result.tree, cfg, data);

  bool finite = result.losses.size() == 300;
  double first = 0, last = 0;
  for (std::size_t i = 0; i < result.losses.size(); ++i) {
    finite = finite && std::isfinite(result.losses[i]);
    if (i < 50) first += result.losses[i];
    if (i + 50 >= result.losses.size()) last += result.losses[i];
  }
  const double ratio = last / first;
  v.detail << " loss ratio=" << ratio << " psnr " << before << " -> " << after << " dB (+"
           << after - before << ")";
  v.require(finite, "300 finite losses");
  v.require(ratio < 0.5, "final/initial loss ratio below 0.5");
  v.require(after - before >= 0.3, "PSNR gain of at least 0.3 dB");
}

double psnr_oracle(const Tensor4<double>& a, const Tensor4<double>& b) {
  double sum = 0;
  for (std::size_t y = 0; y < a.h(); ++y)
    for (std::size_t x = 0; x < a.w(); ++x) sum += std::pow(a(0, 0, y, x) - b(0, 0, y, x), 2);
  return 10.0 * std::log10(255.0 * 255.0 * static_cast<double>(a.size()) / sum);
}

double ssim_oracle(const Tensor4<double>& a, const Tensor4<double>& b) {
  double g[11][11];
  double total = 0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) total += g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
  const double c1 = 6.5025, c2 = 58.5225;
  double acc = 0;
  int windows = 0;
  for (std::size_t y = 0; y + 11 <= a.h(); ++y)
    for (std::size_t x = 0; x + 11 <= a.w(); ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          const double wgt = g[i][j] / total;
          const double p = a(0, 0, y + i, x + j), q = b(0, 0, y + i, x + j);
          ma += wgt * p;
          mb += wgt * q;
          saa += wgt * p * p;
          sbb += wgt * q * q;
          sab += wgt * p * q;
        }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      acc += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  return acc / windows;
}

void metric_oracles(Verdict& v) {
  metrics::EvalProtocol proto;
  proto.y_only = false;
  Tensor4<double> a(1, 1, 16, 16);
  a.fill(100.0);
  Tensor4<double> b = a;
  for (auto& x : b.data()) x += 25.5;
  const double analytic = metrics::psnr(a, b, proto);
  v.detail << " offset psnr=" << analytic;
  v.require(analytic == 20.0, "uniform 25.5 offset gives exactly 20 dB");

  const auto r = smx::testing::random_tensor<double>({1, 1, 16, 16}, 5, 0.0, 255.0);
  const double self = metrics::ssim(r, r, proto);
  v.require(std::abs(self - 1.0) <= 1e-9, "ssim(a, a) = 1");

  double psnr_err = 0, ssim_err = 0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto p = smx::testing::random_tensor<double>({1, 1, 16, 16}, 20 + s, 0.0, 255.0);
    auto q = p;
    const auto noise = smx::testing::random_tensor<double>({1, 1, 16, 16}, 40 + s, -30.0, 30.0);
    for (std::size_t i = 0; i < q.size(); ++i) q.data()[i] += noise.data()[i];
    psnr_err = std::max(psnr_err, std::abs(metrics::psnr(p, q, proto) - psnr_oracle(p, q)));
    ssim_err = std::max(ssim_err, std::abs(metrics::ssim(p, q, proto) - ssim_oracle(p, q)));
  }
  v.detail << " ssim(a,a)-1=" << self - 1.0 << " psnr_err=" << psnr_err << " ssim_err=" << ssim_err;
  v.require(psnr_err <= 1e-9, "psnr oracle");
  v.require(ssim_err <= 1e-9, "ssim oracle");
}

void serialization(Verdict& v) {
  const ModelConfig configs[] = {ModelConfig::tiny(2), ModelConfig::standard(3),
                                 ModelConfig::ablation(Variant::css, Fusion::c_conv)};
  bool stable = true, round_trip = true;
  for (const auto& cfg : configs) {
    const auto a = weights_io::encode(model::build(cfg, 42), cfg);
    const auto b = weights_io::encode(model::build(cfg, 42), cfg);
    stable = stable && weights_io::checksum(a) == weights_io::checksum(b);
    const auto loaded = weights_io::decode(a);
    round_trip = round_trip && loaded.cfg == cfg && loaded.tree == model::build(cfg, 42);
  }
  smx::testing::TempDir dir("acceptance");
  const auto cfg = ModelConfig::tiny(4);
  weights_io::save(model::build(cfg, 9), cfg, dir / "a.smxw");
  weights_io::save(weights_io::load(dir / "a.smxw").tree, cfg, dir / "b.smxw");
  stable = stable && weights_io::file_checksum(dir / "a.smxw") == weights_io::file_checksum(dir / "b.smxw");
  v.require(stable, "identical checksums for identical (config, seed)");
  v.require(round_trip, "bitwise round trip");

  const auto small = ModelConfig::tiny(2);
  auto smaller = small;
  smaller.channels = 8;
  smaller.n_fmb = 1;
  const auto bytes = weights_io::encode(model::build(smaller, 1), smaller);
  std::size_t truncations = 0, truncation_misses = 0;
  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    try {
      (void)weights_io::decode(std::span(bytes.data(), cut));
      ++truncation_misses;
    } catch (const TruncationError&) {
      ++truncations;
    } catch (const Error&) {
      ++truncation_misses;
    }
  }
  std::size_t magic = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (int delta : {1, 0x20, 0x80}) {
      auto bad = bytes;
      bad[i] = static_cast<std::uint8_t>(bad[i] ^ delta);
      try {
        (void)weights_io::decode(bad);
      } catch (const MagicError&) {
        ++magic;
      } catch (const Error&) {
      }
    }
  }
  v.detail << " truncations=" << truncations << "/" << bytes.size() << " magic=" << magic << "/12";
  v.require(truncation_misses == 0, "every proper prefix raises TruncationError");
  v.require(magic == 12, "every corrupted magic raises MagicError");
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Verdict&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "parameter counts (full and tiny, x2/x3/x4)", 1, params_table},
      {2, "kernel-size sweep parameter counts", 1, kernel_sweep},
      {3, "ablation parameters and MACs at 256x256", 1, ablation_table},
      {4, "MACs for a 1280x720 output", 1, hd_macs},
      {5, "gradient check against central differences", 120, gradients},
      {6, "FFT against naive DFT, Parseval, round trip", 10, fft},
      {7, "architectural identities", 10, identities},
      {8, "desk-scale training convergence", 600, convergence},
      {9, "PSNR and SSIM oracles", 10, metric_oracles},
      {10, "determinism and serialization", 10, serialization},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(secs <= c.budget_s, "runtime budget");
    if (!v.ok) ++failures;
    std::printf("[%s] criterion %d: %s (%.2fs)%s\n", v.ok ? "PASS" : "FAIL", c.id, c.title, secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
