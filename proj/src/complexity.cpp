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

#include "smx/complexity.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>

namespace smx::complexity {
namespace {

using model::Fusion;
using model::Variant;

class Counter {
 public:
  explicit Counter(ComplexityReport& r) : r_(r) {}

  void conv(const std::string& name, std::uint64_t out, std::uint64_t in_per_group,
            std::uint64_t k, std::uint64_t pixels) {
    const std::uint64_t weights = out * in_per_group * k * k;
    r_.layers.push_back({name, weights + out, weights * pixels});
  }
  void norm(const std::string& name, std::uint64_t c) { r_.layers.push_back({name, c, 0}); }

 private:
  ComplexityReport& r_;
};

void projection(Counter& c, const std::string& p, std::uint64_t d, std::uint64_t px) {
  c.norm(p + ".norm", d);
  c.conv(p + ".w0", d, d / 2, 1, px);
  c.conv(p + ".w1", d / 2, d, 1, px);
}

}  // namespace

ComplexityReport analyze(const model::ModelConfig& cfg, std::size_t lr_h, std::size_t lr_w) {
  cfg.validate();
  if (lr_h == 0 || lr_w == 0) throw ConfigError("resolution must be positive");
  ComplexityReport r;
  r.lr_h = lr_h;
  r.lr_w = lr_w;
  r.hr_h = lr_h * cfg.scale;
  r.hr_w = lr_w * cfg.scale;
  Counter c(r);
  const std::uint64_t d = cfg.channels;
  const std::uint64_t k = cfg.dw_kernel;
  const std::uint64_t lr = static_cast<std::uint64_t>(lr_h) * lr_w;

  c.conv("head.conv_in", d, 3, 3, lr);
  for (std::size_t i = 0; i < cfg.n_fmb; ++i) {
    const std::string p = "fmb." + std::to_string(i);
    for (int j = 0; j < 2; ++j) {
      const std::string lp = p + "." + model::layer_kind(cfg.variant) + "." + std::to_string(j);
      switch (cfg.variant) {
        case Variant::full:
        case Variant::cdc:
          projection(c, lp + ".proj_in", d, lr);
          c.conv(lp + ".dw", d, 1, k, lr);
          projection(c, lp + ".proj_out", d, lr);
          break;
        case Variant::css:
          projection(c, lp + ".proj", d, lr);
          c.conv(lp + ".dw", d, 1, k, lr);
          break;
        case Variant::convmixer_baseline:
          c.conv(lp + ".dw", d, 1, k, lr);
          c.norm(lp + ".norm", d);
          c.conv(lp + ".mlp0", 2 * d, d, 1, lr);
          c.conv(lp + ".mlp1", d, 2 * d, 1, lr);
          break;
      }
    }
    const std::string f = p + ".fuse";
    const std::uint64_t e = d + cfg.expansion_extra;
    switch (cfg.fusion) {
      case Fusion::none: break;
      case Fusion::conv:
      case Fusion::s_conv: c.conv(f + ".conv", d, d, 3, lr); break;
      case Fusion::c_conv: c.conv(f + ".conv", d, 2 * d, 3, lr); break;
      case Fusion::s_resblock:
        c.conv(f + ".conv0", d, d, 3, lr);
        c.conv(f + ".conv1", d, d, 3, lr);
        break;
      case Fusion::s_fmbconv:
        c.conv(f + ".expand", e, d, 3, lr);
        c.conv(f + ".reduce", d, e, 1, lr);
        break;
    }
  }
  if (cfg.scale == 4) {
    c.conv("upsampler.0.conv", 4 * d, d, 1, lr);
    c.conv("upsampler.1.conv", 4 * d, d, 1, 4 * lr);
  } else {
    c.conv("upsampler.0.conv", cfg.scale * cfg.scale * d, d, 1, lr);
  }
  c.conv("tail.conv_out", 3, d, 3, lr * cfg.scale * cfg.scale);

  for (const auto& l : r.layers) {
    r.total_params += l.params;
    r.total_macs += l.macs;
  }
  return r;
}

std::uint64_t count_params(const model::ModelConfig& cfg) { return analyze(cfg, 1, 1).total_params; }

std::uint64_t count_macs(const model::ModelConfig& cfg, std::size_t lr_h, std::size_t lr_w) {
  return analyze(cfg, lr_h, lr_w).total_macs;
}

std::pair<std::size_t, std::size_t> hd_lr_size(std::size_t scale) {
  if (scale == 0) throw ConfigError("scale must be positive");
  return {(720 + scale - 1) / scale, (1280 + scale - 1) / scale};
}

std::string with_thousands(std::uint64_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string display_params(std::uint64_t params) {
  char buf[32];
  const double k = static_cast<double>(params) / 1000.0;
  if (k < 100.0) {
    std::snprintf(buf, sizeof buf, "%.1fK", k);
  } else {
    std::snprintf(buf, sizeof buf, "%.0fK", k);
  }
  return buf;
}

std::string display_macs(std::uint64_t macs) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fG", static_cast<double>(macs) / 1e9);
  return buf;
}

void write_table(std::ostream& os, const model::ModelConfig& cfg, const ComplexityReport& r) {
  os << "model: variant=" << model::to_string(cfg.variant)
     << " fusion=" << model::to_string(cfg.fusion) << " channels=" << cfg.channels
     << " kernel=" << cfg.dw_kernel << " fmb=" << cfg.n_fmb << " scale=" << cfg.scale
     << " expansion=" << cfg.expansion_extra << "\n";
  os << "input: LR " << r.lr_w << "x" << r.lr_h << " -> HR " << r.hr_w << "x" << r.hr_h << "\n\n";
  std::size_t width = 5;
  for (const auto& l : r.layers) width = std::max(width, l.name.size());
  os << std::left << std::setw(static_cast<int>(width)) << "layer" << std::right << std::setw(14)
     << "params" << std::setw(20) << "macs" << "\n";
  for (const auto& l : r.layers) {
    os << std::left << std::setw(static_cast<int>(width)) << l.name << std::right << std::setw(14)
       << with_thousands(l.params) << std::setw(20) << with_thousands(l.macs) << "\n";
  }
  os << "\ntotal params: " << with_thousands(r.total_params) << " ("
     << display_params(r.total_params) << ")\n";
  os << "total MACs:   " << with_thousands(r.total_macs) << " (" << display_macs(r.total_macs)
     << ")\n";
}

void write_records(std::ostream& os, const ComplexityReport& r) {
  for (const auto& l : r.layers) {
    os << "layer\t" << l.name << '\t' << l.params << '\t' << l.macs << '\n';
  }
  os << "total\t" << r.total_params << '\t' << r.total_macs << '\n';
}

}  // namespace smx::complexity
