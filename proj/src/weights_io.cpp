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

#include "smx/weights_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "smx/rng.hpp"

namespace smx::weights_io {
namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const std::string& part) const {
    if (!has(n)) throw TruncationError(part);
  }
  std::uint8_t u8(const std::string& part) {
    need(1, part);
    return bytes_[pos_++];
  }
  std::uint16_t u16(const std::string& part) {
    need(2, part);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint32_t u32(const std::string& part) {
    need(4, part);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  float f32(const std::string& part) { return std::bit_cast<float>(u32(part)); }
  std::string str(std::size_t n, const std::string& part) {
    need(n, part);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string describe(const std::vector<std::uint32_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s + "]";
}

std::vector<std::uint32_t> spec_dims(const model::ParamSpec& spec) {
  const std::size_t all[4] = {spec.shape.n, spec.shape.c, spec.shape.h, spec.shape.w};
  return std::vector<std::uint32_t>(all, all + spec.rank);
}

}  // namespace

ParamTree<Real> init_params(const model::ModelConfig& cfg, std::uint64_t seed) {
  ParamTree<Real> tree;
  for (const auto& spec : model::layout(cfg)) {
    Tensor4<Real> value(spec.shape);
    switch (spec.role) {
      case model::ParamRole::bias: break;
      case model::ParamRole::gamma: value.fill(Real(1)); break;
      case model::ParamRole::coeffs: {
        Rng rng(Rng::mix(seed, Rng::hash(spec.name)));
        const double bound = std::sqrt(6.0 / static_cast<double>(spec.fan_in));
        for (auto& v : value.data()) v = static_cast<Real>(rng.uniform(-bound, bound));
        break;
      }
    }
    tree.add(spec.name, spec.rank, std::move(value));
  }
  return tree;
}

template <typename T>
std::vector<std::uint8_t> encode(const ParamTree<T>& tree, const model::ModelConfig& cfg) {
  model::check_tree(tree, cfg);
  Writer w;
  w.raw(std::string_view(kMagic, 4));
  w.u16(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(cfg.channels));
  w.u16(static_cast<std::uint16_t>(cfg.dw_kernel));
  w.u16(static_cast<std::uint16_t>(cfg.n_fmb));
  w.u16(static_cast<std::uint16_t>(cfg.scale));
  w.u16(static_cast<std::uint16_t>(cfg.expansion_extra));
  w.u16(static_cast<std::uint16_t>(cfg.variant));
  w.u16(static_cast<std::uint16_t>(cfg.fusion));
  for (const auto& p : tree) {
    w.u16(static_cast<std::uint16_t>(p.name.size()));
    w.raw(p.name);
    w.u8(static_cast<std::uint8_t>(p.rank));
    for (const std::uint32_t d : p.dims()) w.u32(d);
    for (const T v : p.value.data()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

Loaded decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::string header = "header";
  const std::string magic = r.str(4, header);
  if (magic != std::string_view(kMagic, 4)) {
    throw MagicError("bad magic: expected \"SMXW\"");
  }
  const std::uint16_t version = r.u16(header);
  if (version != kFormatVersion) {
    throw VersionError("unsupported format version " + std::to_string(version) + " (expected " +
                       std::to_string(kFormatVersion) + ")");
  }
  model::ModelConfig cfg;
  cfg.channels = r.u16(header);
  cfg.dw_kernel = r.u16(header);
  cfg.n_fmb = r.u16(header);
  cfg.scale = r.u16(header);
  cfg.expansion_extra = r.u16(header);
  cfg.variant = static_cast<model::Variant>(r.u16(header));
  cfg.fusion = static_cast<model::Fusion>(r.u16(header));
  std::vector<model::ParamSpec> specs;
  try {
    specs = model::layout(cfg);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("invalid model configuration in header: ") + e.what());
  }

  ParamTree<Real> tree;
  for (const auto& spec : specs) {
    const std::size_t name_len = r.u16(spec.name);
    const std::string name = r.str(name_len, spec.name);
    if (name != spec.name) {
      throw ShapeMismatchError("expected tensor '" + spec.name + "', found '" + name + "'");
    }
    const std::size_t rank = r.u8(spec.name);
    std::vector<std::uint32_t> dims;
    for (std::size_t i = 0; i < rank; ++i) dims.push_back(r.u32(spec.name));
    const auto expected = spec_dims(spec);
    if (dims != expected) {
      throw ShapeMismatchError("tensor '" + spec.name + "' has dims " + describe(dims) +
                               ", configuration expects " + describe(expected));
    }
    r.need(4 * spec.shape.numel(), spec.name);
    std::vector<Real> values(spec.shape.numel());
    for (auto& v : values) v = static_cast<Real>(r.f32(spec.name));
    tree.add(spec.name, spec.rank, Tensor4<Real>(spec.shape, std::move(values)));
  }
  if (r.remaining() != 0) {
    throw TrailingBytesError(std::to_string(r.remaining()) + " trailing bytes after last tensor");
  }
  return Loaded{std::move(tree), cfg};
}

template <typename T>
void save(const ParamTree<T>& tree, const model::ModelConfig& cfg,
          const std::filesystem::path& path) {
  const auto bytes = encode(tree, cfg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open weights file '" + path.string() + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

Loaded load(const std::filesystem::path& path) { return decode(read_file(path)); }

Loaded load(const std::filesystem::path& path, const model::ModelConfig& expected) {
  Loaded l = load(path);
  if (!(l.cfg == expected)) {
    throw ConfigMismatchError("weights file '" + path.string() +
                              "' was written for a different model configuration");
  }
  return l;
}

std::uint64_t checksum(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_checksum(const std::filesystem::path& path) { return checksum(read_file(path)); }

template std::vector<std::uint8_t> encode<float>(const ParamTree<float>&, const model::ModelConfig&);
template std::vector<std::uint8_t> encode<double>(const ParamTree<double>&,
                                                  const model::ModelConfig&);
template void save<float>(const ParamTree<float>&, const model::ModelConfig&,
                          const std::filesystem::path&);
template void save<double>(const ParamTree<double>&, const model::ModelConfig&,
                           const std::filesystem::path&);

}  // namespace smx::weights_io
