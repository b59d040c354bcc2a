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

#include "smx/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "smx/complexity.hpp"
#include "smx/config_file.hpp"
#include "smx/image_io.hpp"
#include "smx/metrics.hpp"
#include "smx/ops.hpp"
#include "smx/train.hpp"
#include "smx/weights_io.hpp"

namespace smx::cli {
namespace {

namespace fs = std::filesystem;

/// "WIDTHxHEIGHT" -> (h, w).
std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ConfigError("size must look like WIDTHxHEIGHT, got '" + text + "'");
  std::size_t w = 0;
  std::size_t h = 0;
  try {
    std::size_t used = 0;
    w = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    h = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw ConfigError("size must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  if (h == 0 || w == 0) throw ConfigError("size extents must be positive");
  return {h, w};
}

std::string format_db(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string format_ssim(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<fs::path> png_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Tensor4<Real> super_resolve(const weights_io::Loaded& w, const Tensor4<Real>& lr) {
  return model::forward(w.tree, w.cfg, lr);
}

struct CountArgs {
  std::size_t channels = 64;
  std::size_t kernel = 7;
  std::size_t fmb = 5;
  std::size_t scale = 4;
  std::size_t expansion = 16;
  std::string variant = "full";
  std::string fusion;
  std::string lr_size;
  bool records = false;
};

int cmd_count(const CountArgs& a, std::ostream& out) {
  model::ModelConfig cfg;
  cfg.channels = a.channels;
  cfg.dw_kernel = a.kernel;
  cfg.n_fmb = a.fmb;
  cfg.scale = a.scale;
  cfg.expansion_extra = a.expansion;
  cfg.variant = model::parse_variant(a.variant);
  cfg.fusion = a.fusion.empty() ? model::default_fusion(cfg.variant) : model::parse_fusion(a.fusion);
  cfg.validate();
  const auto [h, w] = a.lr_size.empty() ? complexity::hd_lr_size(cfg.scale) : parse_size(a.lr_size);
  const auto report = complexity::analyze(cfg, h, w);
  if (a.records) {
    complexity::write_records(out, report);
  } else {
    complexity::write_table(out, cfg, report);
  }
  return kOk;
}

int cmd_sr(const std::string& weights, const std::string& input, const std::string& output,
           std::ostream& out) {
  const auto w = weights_io::load(weights);
  const Tensor4<Real> lr = image_io::read_png(input);
  const Tensor4<Real> sr = super_resolve(w, lr);
  image_io::write_png(output, sr);
  out << "wrote " << output << " (" << sr.w() << "x" << sr.h() << ")\n";
  return kOk;
}

int cmd_degrade(const std::string& input, std::size_t scale, const std::string& output,
                std::ostream& out) {
  if (scale < 1) throw ConfigError("scale must be at least 1");
  const Tensor4<Real> hr = image_io::read_png(input);
  const std::size_t h = hr.h() / scale * scale;
  const std::size_t w = hr.w() / scale * scale;
  if (h == 0 || w == 0) throw ConfigError("image is smaller than the scale factor");
  Tensor4<Real> cropped(1, 3, h, w);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) cropped(0, c, y, x) = hr(0, c, y, x);
    }
  }
  const Tensor4<Real> lr =
      scale == 1 ? cropped : ops::bicubic_resize(cropped, 1.0 / static_cast<double>(scale));
  image_io::write_png(output, lr);
  out << "wrote " << output << " (" << lr.w() << "x" << lr.h() << ")\n";
  return kOk;
}

int cmd_eval(const std::string& weights, const std::string& lr_dir, const std::string& hr_dir,
             std::optional<std::size_t> scale, std::ostream& out, std::ostream& err) {
  const auto w = weights_io::load(weights);
  if (scale && *scale != w.cfg.scale) {
    throw ConfigError("--scale " + std::to_string(*scale) + " disagrees with weights scale " +
                      std::to_string(w.cfg.scale));
  }
  std::map<std::string, fs::path> lr_by_stem;
  for (const auto& p : png_files(lr_dir)) lr_by_stem[p.stem().string()] = p;
  std::map<std::string, fs::path> hr_by_stem;
  for (const auto& p : png_files(hr_dir)) hr_by_stem[p.stem().string()] = p;

  for (const auto& [stem, path] : lr_by_stem) {
    if (hr_by_stem.count(stem) == 0) err << "warning: no HR match for " << path.string() << "\n";
  }
  metrics::EvalProtocol proto;
  proto.shave = w.cfg.scale;
  std::vector<std::pair<std::string, metrics::PairScore>> rows;
  for (const auto& [stem, hr_path] : hr_by_stem) {
    const auto it = lr_by_stem.find(stem);
    if (it == lr_by_stem.end()) {
      err << "warning: no LR match for " << hr_path.string() << "\n";
      continue;
    }
    try {
      const Tensor4<Real> lr = image_io::read_png(it->second);
      const Tensor4<Real> hr = image_io::read_png(hr_path);
      const Tensor4<Real> sr = image_io::dequantize(image_io::quantize(super_resolve(w, lr)),
                                                    lr.h() * w.cfg.scale, lr.w() * w.cfg.scale);
      if (!(sr.shape() == hr.shape())) {
        err << "warning: skipping " << stem << ": SR " << sr.w() << "x" << sr.h() << " vs HR "
            << hr.w() << "x" << hr.h() << "\n";
        continue;
      }
      rows.emplace_back(stem, metrics::evaluate_rgb(sr, hr, proto));
    } catch (const Error& e) {
      err << "warning: skipping " << stem << ": " << e.what() << "\n";
    }
  }
  if (rows.empty()) throw ConfigError("no usable LR/HR pairs found");

  out << "file\tpsnr_db\tssim\n";
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  for (const auto& [stem, s] : rows) {
    out << stem << '\t' << format_db(s.psnr) << '\t' << format_ssim(s.ssim) << '\n';
    psnr_sum += s.psnr;
    ssim_sum += s.ssim;
  }
  const double n = static_cast<double>(rows.size());
  out << "mean\t" << format_db(psnr_sum / n) << '\t' << format_ssim(ssim_sum / n) << '\n';
  return kOk;
}

int cmd_train(const std::string& config, const std::string& data_dir, std::size_t synthetic,
              const std::string& out_dir, std::ostream& out) {
  const auto settings = config_file::load_train_settings(config);
  std::vector<Tensor4<Real>> images;
  if (!data_dir.empty()) {
    for (const auto& p : png_files(data_dir)) images.push_back(image_io::read_png(p));
  }
  for (std::size_t i = 0; i < synthetic; ++i) {
    images.push_back(train::synthetic_image(Rng::mix(settings.train.seed, i)));
  }
  if (images.empty()) throw ConfigError("no training images (use --data-dir or --synthetic)");
  const auto data = train::Dataset::from_hr(std::move(images), settings.model.scale);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto checkpoint = [&](std::size_t step, const ParamTree<Real>& tree) {
    const fs::path p = dir / ("checkpoint_" + std::to_string(step) + ".smxw");
    weights_io::save(tree, settings.model, p);
    out << "checkpoint " << p.string() << "\n";
  };
  const auto result = train::train_loop(settings.model, settings.train, data, checkpoint);
  weights_io::save(result.tree, settings.model, dir / "weights.smxw");
  std::ofstream log(dir / "loss.txt");
  if (!log) throw Error("cannot write loss log in '" + dir.string() + "'");
  log << "step\tloss\n";
  char buf[64];
  for (std::size_t i = 0; i < result.losses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", result.losses[i]);
    log << (i + 1) << '\t' << buf << '\n';
  }
  out << "trained " << result.losses.size() << " steps on " << data.size() << " images\n";
  if (!result.losses.empty()) out << "final loss " << result.losses.back() << "\n";
  out << "wrote " << (dir / "weights.smxw").string() << "\n";
  return kOk;
}

int cmd_gradcheck(std::size_t channels, std::size_t fmb, std::size_t kernel, std::size_t scale,
                  double eps, std::uint64_t seed, std::ostream& out) {
  model::ModelConfig cfg = model::ModelConfig::tiny(scale);
  cfg.channels = channels;
  cfg.n_fmb = fmb;
  cfg.dw_kernel = kernel;
  cfg.validate();
  const auto r = train::grad_check(cfg, eps, seed);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", r.max_rel_error);
  out << "checked " << r.checked << " scalars in " << r.tensors << " tensors\n";
  out << "max relative error " << buf << " at " << r.worst_param << "\n";
  const bool ok = r.max_rel_error < 1e-4;
  out << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lightweight image super-resolution toolkit", "smx"};
  app.require_subcommand(1);

  CountArgs count;
  auto* c = app.add_subcommand("count", "Parameter and MAC accounting");
  c->add_option("--channels", count.channels, "Feature channels")->capture_default_str();
  c->add_option("--kernel", count.kernel, "Depth-wise kernel size")->capture_default_str();
  c->add_option("--fmb", count.fmb, "Number of feature mixing blocks")->capture_default_str();
  c->add_option("--scale", count.scale, "Upscaling factor (2, 3, 4)")->capture_default_str();
  c->add_option("--expansion", count.expansion, "Extra channels in the fused expansion")
      ->capture_default_str();
  c->add_option("--variant", count.variant, "full, cdc, css or convmixer_baseline")
      ->capture_default_str();
  c->add_option("--fusion", count.fusion,
                "none, conv, s_conv, c_conv, s_resblock or s_fmbconv (default by variant)");
  c->add_option("--lr-size", count.lr_size, "LR size WIDTHxHEIGHT (default 1280x720 / scale)");
  c->add_flag("--records", count.records, "Emit tab-separated records instead of a table");

  std::string weights, input, output;
  auto* sr = app.add_subcommand("sr", "Super-resolve one PNG");
  sr->add_option("--weights", weights, "Weights file")->required();
  sr->add_option("--input", input, "LR PNG")->required();
  sr->add_option("--output", output, "SR PNG")->required();

  std::size_t degrade_scale = 4;
  auto* dg = app.add_subcommand("degrade", "Bicubic downscale of one PNG");
  dg->add_option("--input", input, "HR PNG")->required();
  dg->add_option("--scale", degrade_scale, "Downscaling factor")->required();
  dg->add_option("--output", output, "LR PNG")->required();

  std::string lr_dir, hr_dir;
  std::optional<std::size_t> eval_scale;
  auto* ev = app.add_subcommand("eval", "PSNR / SSIM on paired LR and HR folders");
  ev->add_option("--weights", weights, "Weights file")->required();
  ev->add_option("--lr-dir", lr_dir, "Folder of LR PNGs")->required();
  ev->add_option("--hr-dir", hr_dir, "Folder of HR PNGs with matching names")->required();
  ev->add_option("--scale", eval_scale, "Expected scale (checked against the weights)");

  std::string config, data_dir, out_dir;
  std::size_t synthetic = 0;
  auto* tr = app.add_subcommand("train", "Train from a key:value config");
  tr->add_option("--config", config, "Config file")->required();
  tr->add_option("--data-dir", data_dir, "Folder of HR PNGs");
  tr->add_option("--synthetic", synthetic, "Number of procedural HR images to add");
  tr->add_option("--out", out_dir, "Output folder for weights and loss log")->required();

  std::size_t gc_channels = 8, gc_fmb = 1, gc_kernel = 3, gc_scale = 2;
  double gc_eps = 1e-5;
  std::uint64_t gc_seed = 1;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check (64-bit)");
  gc->add_option("--channels", gc_channels)->capture_default_str();
  gc->add_option("--fmb", gc_fmb)->capture_default_str();
  gc->add_option("--kernel", gc_kernel)->capture_default_str();
  gc->add_option("--scale", gc_scale)->capture_default_str();
  gc->add_option("--eps", gc_eps)->capture_default_str();
  gc->add_option("--seed", gc_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) return cmd_count(count, out);
    if (sr->parsed()) return cmd_sr(weights, input, output, out);
    if (dg->parsed()) return cmd_degrade(input, degrade_scale, output, out);
    if (ev->parsed()) return cmd_eval(weights, lr_dir, hr_dir, eval_scale, out, err);
    if (tr->parsed()) return cmd_train(config, data_dir, synthetic, out_dir, out);
    if (gc->parsed()) {
      return cmd_gradcheck(gc_channels, gc_fmb, gc_kernel, gc_scale, gc_eps, gc_seed, out);
    }
  } catch (const ConfigSyntaxError& e) {
    err << "error: config " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kWeights;
  } catch (const ImageIoError& e) {
    err << "error: " << e.what() << "\n";
    return kImageIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace smx::cli
