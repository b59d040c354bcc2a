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

#include <map>
#include <sstream>

#include "smx/complexity.hpp"
#include "smx/model.hpp"

using namespace smx;
using complexity::analyze;
using complexity::count_macs;
using complexity::count_params;
using model::Fusion;
using model::ModelConfig;
using model::Variant;

namespace {

std::vector<ModelConfig> grid() {
  std::vector<ModelConfig> out;
  for (std::size_t s : {2, 3, 4}) {
    out.push_back(ModelConfig::standard(s));
    out.push_back(ModelConfig::tiny(s));
  }
  for (std::size_t k : {3, 5, 7, 9, 11, 13}) {
    ModelConfig c = ModelConfig::tiny(4);
    c.dw_kernel = k;
    out.push_back(c);
  }
  for (auto v : {Variant::cdc, Variant::css, Variant::convmixer_baseline}) {
    out.push_back(ModelConfig::ablation(v, Fusion::none));
  }
  for (auto f : {Fusion::conv, Fusion::s_conv, Fusion::c_conv, Fusion::s_resblock, Fusion::s_fmbconv}) {
    out.push_back(ModelConfig::ablation(Variant::cdc, f));
  }
  return out;
}

std::string prefix_of(const std::string& name) { return name.substr(0, name.rfind('.')); }

}  // namespace

TEST_CASE("count_params equals the instantiated tree over the grid") {
  for (const auto& cfg : grid()) {
    CHECK(count_params(cfg) == model::build(cfg, 0).scalar_count());
  }
}

TEST_CASE("per-layer entries match an oracle built from tree shapes") {
  for (const auto& cfg : grid()) {
    const std::size_t h = 7, w = 5;
    const auto tree = model::build(cfg, 0);
    std::map<std::string, std::uint64_t> params;
    std::map<std::string, std::uint64_t> macs;
    std::vector<std::string> order;
    for (const auto& p : tree) {
      const std::string layer = prefix_of(p.name);
      if (params.count(layer) == 0) order.push_back(layer);
      params[layer] += p.value.size();
      if (p.name.size() > 7 && p.name.substr(p.name.size() - 7) == ".coeffs") {
        std::uint64_t px = h * w;
        if (layer == "upsampler.1.conv") px *= 4;
        if (layer == "tail.conv_out") px *= cfg.scale * cfg.scale;
        macs[layer] = p.value.size() * px;
      }
    }
    const auto r = analyze(cfg, h, w);
    REQUIRE(r.layers.size() == order.size());
    std::uint64_t sp = 0, sm = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      CHECK(r.layers[i].name == order[i]);
      CHECK(r.layers[i].params == params[order[i]]);
      CHECK(r.layers[i].macs == macs[order[i]]);
      sp += r.layers[i].params;
      sm += r.layers[i].macs;
    }
    CHECK(r.total_params == sp);
    CHECK(r.total_macs == sm);
    CHECK(r.hr_h == h * cfg.scale);
    CHECK(r.hr_w == w * cfg.scale);
  }
}

TEST_CASE("closed-form examples") {
  CHECK(count_params(ModelConfig::standard(4)) == 410643);
  ModelConfig k13 = ModelConfig::tiny(4);
  k13.dw_kernel = 13;
  CHECK(count_params(k13) == 163891);
  CHECK(count_params(ModelConfig::ablation(Variant::cdc, Fusion::none)) == 35491);

  // Mixer layer MACs per pixel for D=32, k=3: 2*(16*32 + 32*16) + 32*9.
  const auto r = analyze(ModelConfig::tiny(4), 1, 1);
  std::uint64_t layer_macs = 0;
  for (const auto& l : r.layers) {
    if (l.name.rfind("fmb.0.mixer.0.", 0) == 0) layer_macs += l.macs;
  }
  CHECK(layer_macs == 2336);
  CHECK(count_macs(ModelConfig::tiny(4), 180, 320) == 7794892800ULL);
  CHECK(count_macs(ModelConfig::standard(4), 180, 320) == 27681177600ULL);
  CHECK(count_macs(ModelConfig::ablation(Variant::cdc, Fusion::none), 256, 256) == 3835691008ULL);
}

TEST_CASE("MACs scale linearly with pixel count") {
  for (const auto& cfg : grid()) {
    CHECK(count_macs(cfg, 20, 30) * 4 == count_macs(cfg, 40, 60));
  }
}

TEST_CASE("kernel monotonicity") {
  std::uint64_t last_p = 0, last_m = 0;
  for (std::size_t k : {3, 5, 7, 9, 11, 13}) {
    ModelConfig c = ModelConfig::tiny(4);
    c.dw_kernel = k;
    CHECK(count_params(c) > last_p);
    CHECK(count_macs(c, 64, 64) > last_m);
    last_p = count_params(c);
    last_m = count_macs(c, 64, 64);
  }
}

TEST_CASE("errors") {
  ModelConfig bad = ModelConfig::tiny(4);
  bad.scale = 7;
  CHECK_THROWS_AS(count_params(bad), ConfigError);
  CHECK_THROWS_AS(count_macs(ModelConfig::tiny(4), 0, 10), ConfigError);
}

TEST_CASE("display helpers") {
  CHECK(complexity::with_thousands(0) == "0");
  CHECK(complexity::with_thousands(999) == "999");
  CHECK(complexity::with_thousands(35491) == "35,491");
  CHECK(complexity::with_thousands(410643) == "410,643");
  CHECK(complexity::with_thousands(27681177600ULL) == "27,681,177,600");
  CHECK(complexity::display_params(410643) == "411K");
  CHECK(complexity::display_params(35491) == "35.5K");
  CHECK(complexity::display_macs(27681177600ULL) == "27.7G");
  CHECK(complexity::hd_lr_size(2) == std::pair<std::size_t, std::size_t>{360, 640});
  CHECK(complexity::hd_lr_size(3) == std::pair<std::size_t, std::size_t>{240, 427});
  CHECK(complexity::hd_lr_size(4) == std::pair<std::size_t, std::size_t>{180, 320});
}

TEST_CASE("records output") {
  const auto r = analyze(ModelConfig::tiny(2), 4, 4);
  std::ostringstream os;
  complexity::write_records(os, r);
  std::istringstream in(os.str());
  std::string line;
  std::size_t layers = 0;
  std::uint64_t sum_p = 0;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string tag;
    f >> tag;
    if (tag == "layer") {
      std::string name;
      std::uint64_t p = 0, m = 0;
      f >> name >> p >> m;
      sum_p += p;
      ++layers;
    } else {
      CHECK(tag == "total");
      std::uint64_t p = 0;
      f >> p;
      CHECK(p == sum_p);
    }
  }
  CHECK(layers == r.layers.size());
  std::ostringstream table;
  complexity::write_table(table, ModelConfig::tiny(2), r);
  CHECK(table.str().find("108,467 (108K)") != std::string::npos);
}
