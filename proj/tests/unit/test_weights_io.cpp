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

#include <doctest.h>

#include <fstream>

#include "smx/weights_io.hpp"
#include "support.hpp"

using namespace smx;
using model::ModelConfig;
using smx::testing::TempDir;

namespace {

std::vector<ModelConfig> grid() {
  std::vector<ModelConfig> out = {ModelConfig::tiny(2), ModelConfig::tiny(3), ModelConfig::standard(4)};
  for (auto v : {model::Variant::cdc, model::Variant::css, model::Variant::convmixer_baseline}) {
    out.push_back(ModelConfig::ablation(v, model::Fusion::none));
  }
  out.push_back(ModelConfig::ablation(model::Variant::cdc, model::Fusion::s_resblock));
  out.push_back(ModelConfig::ablation(model::Variant::css, model::Fusion::c_conv));
  return out;
}

ParamTree<Real> randomized(const ModelConfig& cfg, std::uint64_t seed) {
  auto tree = model::build(cfg, seed);
  Rng rng(seed);
  for (auto& p : tree)
    for (auto& v : p.value.data()) v = static_cast<Real>(rng.uniform(-10, 10));
  return tree;
}

/// Byte offsets at which each record (and the header) ends.
std::vector<std::pair<std::size_t, std::string>> record_ends(const ParamTree<Real>& tree) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t pos = 4 + 2 + 7 * 2;
  out.emplace_back(pos, "header");
  for (const auto& p : tree) {
    pos += 2 + p.name.size() + 1 + 4 * p.rank + 4 * p.value.size();
    out.emplace_back(pos, p.name);
  }
  return out;
}

}  // namespace

TEST_CASE("init values") {
  const auto cfg = ModelConfig::standard(4);
  const auto tree = weights_io::init_params(cfg, 1);
  for (const auto& p : tree) {
    const bool gamma = p.name.ends_with(".gamma");
    const bool bias = p.name.ends_with(".bias");
    for (float v : p.value.data()) {
      if (gamma) CHECK(v == 1.0f);
      if (bias) CHECK(v == 0.0f);
    }
  }
}

TEST_CASE("init range and mean of a 3x3, 32-in layer") {
  const auto tree = weights_io::init_params(ModelConfig::tiny(4), 5);
  const auto& c = tree.at("fmb.0.fuse.expand.coeffs");
  REQUIRE(c.c() == 32);
  REQUIRE(c.h() == 3);
  REQUIRE(c.size() >= 10000);
  const double bound = std::sqrt(6.0 / 288.0);
  double sum = 0;
  for (float v : c.data()) {
    CHECK(std::abs(v) <= bound);
    sum += v;
  }
  CHECK(std::abs(sum / static_cast<double>(c.size())) < 0.005);
}

TEST_CASE("init streams are independent of unrelated layers") {
  const auto a = weights_io::init_params(ModelConfig::ablation(model::Variant::cdc, model::Fusion::none), 9);
  const auto b = weights_io::init_params(ModelConfig::ablation(model::Variant::cdc, model::Fusion::s_conv), 9);
  for (const auto& p : a) {
    if (b.contains(p.name)) CHECK(b.at(p.name) == p.value);
  }
}

TEST_CASE("round trip is bitwise for every configuration") {
  TempDir dir("weights");
  std::uint64_t seed = 0;
  for (const auto& cfg : grid()) {
    const auto tree = randomized(cfg, ++seed);
    const auto path = dir / ("w" + std::to_string(seed) + ".smxw");
    weights_io::save(tree, cfg, path);
    const auto loaded = weights_io::load(path);
    CHECK(loaded.cfg == cfg);
    CHECK(loaded.tree == tree);
    CHECK(weights_io::load(path, cfg).tree == tree);
    CHECK(weights_io::encode(loaded.tree, loaded.cfg) == weights_io::encode(tree, cfg));
  }
}

TEST_CASE("checksums are stable") {
  const auto cfg = ModelConfig::tiny(4);
  const auto a = weights_io::encode(model::build(cfg, 77), cfg);
  const auto b = weights_io::encode(model::build(cfg, 77), cfg);
  CHECK(weights_io::checksum(a) == weights_io::checksum(b));
  CHECK(weights_io::checksum(a) != weights_io::checksum(weights_io::encode(model::build(cfg, 78), cfg)));
}

TEST_CASE("header layout is little-endian") {
  const auto cfg = ModelConfig::tiny(3);
  const auto bytes = weights_io::encode(model::build(cfg, 0), cfg);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SMXW");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 32);  // D
  CHECK(bytes[8] == 3);   // k
  CHECK(bytes[10] == 5);  // n_fmb
  CHECK(bytes[12] == 3);  // s
  CHECK(bytes[14] == 16); // C'
  CHECK(bytes[16] == 0);  // variant
  CHECK(bytes[18] == 5);  // fusion
}

TEST_CASE("bad magic and version") {
  const auto cfg = ModelConfig::tiny(2);
  auto bytes = weights_io::encode(model::build(cfg, 0), cfg);
  auto magic = bytes;
  std::fill(magic.begin(), magic.begin() + 4, 'X');
  CHECK_THROWS_AS(weights_io::decode(magic), MagicError);
  auto version = bytes;
  version[4] = 2;
  CHECK_THROWS_AS(weights_io::decode(version), VersionError);
  auto variant = bytes;
  variant[16] = 9;
  CHECK_THROWS_AS(weights_io::decode(variant), ParseError);
}

TEST_CASE("truncation at every record boundary names the tensor") {
  const auto cfg = ModelConfig::tiny(2);
  const auto tree = model::build(cfg, 4);
  const auto bytes = weights_io::encode(tree, cfg);
  const auto ends = record_ends(tree);
  REQUIRE(ends.back().first == bytes.size());
  for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
    const std::size_t start = ends[i].first;
    const std::string& next = ends[i + 1].second;
    // Cut exactly at the boundary, one byte into the next record, and mid-payload.
    for (std::size_t cut : {start, start + 1, (start + ends[i + 1].first) / 2, ends[i + 1].first - 1}) {
      const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + static_cast<long>(cut));
      try {
        (void)weights_io::decode(part);
        FAIL("expected TruncationError at " << cut);
      } catch (const TruncationError& e) {
        CHECK(e.part() == next);
      }
    }
  }
  for (std::size_t cut = 0; cut < ends[0].first; ++cut) {
    const std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    if (cut < 4) {
      CHECK_THROWS_AS(weights_io::decode(part), TruncationError);
    } else {
      try {
        (void)weights_io::decode(part);
        FAIL("expected TruncationError");
      } catch (const TruncationError& e) {
        CHECK(e.part() == "header");
      }
    }
  }
}

TEST_CASE("shape mismatches and trailing bytes") {
  const auto cfg = ModelConfig::tiny(2);
  const auto tree = model::build(cfg, 4);
  auto bytes = weights_io::encode(tree, cfg);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(weights_io::decode(trailing), TrailingBytesError);

  auto renamed = bytes;
  renamed[20 + 2] ^= 0x20;  // first character of the first tensor name
  CHECK_THROWS_AS(weights_io::decode(renamed), ShapeMismatchError);

  auto dims = bytes;
  const std::size_t first_dim = 20 + 2 + tree[0].name.size() + 1;
  dims[first_dim] += 1;
  CHECK_THROWS_AS(weights_io::decode(dims), ShapeMismatchError);

  auto header = bytes;
  header[6] = 16;  // D no longer matches the records
  CHECK_THROWS_AS(weights_io::decode(header), ShapeMismatchError);
}

TEST_CASE("load with a different expected configuration") {
  TempDir dir("weights_cfg");
  const auto cfg = ModelConfig::tiny(2);
  weights_io::save(model::build(cfg, 0), cfg, dir / "a.smxw");
  CHECK_THROWS_AS(weights_io::load(dir / "a.smxw", ModelConfig::tiny(4)), ConfigMismatchError);
  CHECK_THROWS_AS(weights_io::load(dir / "missing.smxw"), ParseError);
}

TEST_CASE("double trees are stored as 32-bit") {
  const auto cfg = ModelConfig::tiny(2);
  const auto tree = model::build(cfg, 8);
  CHECK(weights_io::encode(tree.cast<double>(), cfg) == weights_io::encode(tree, cfg));
}
