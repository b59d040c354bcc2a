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

// OpenMP kernels against their serial reference counterparts.
//
//   ./build/bench/smx_bench --benchmark_filter=Conv

#include <benchmark/benchmark.h>

#include <string>

#include "smx/model.hpp"
#include "smx/ops.hpp"
#include "smx/reference.hpp"
#include "smx/rng.hpp"

namespace {

using smx::Tensor4;

Tensor4<float> noise(smx::Shape4 shape, std::uint64_t seed) {
  Tensor4<float> t(shape);
  smx::Rng rng(seed);
  for (auto& v : t.data()) v = static_cast<float>(rng.uniform(-1, 1));
  return t;
}

struct ConvCase {
  Tensor4<float> x;
  Tensor4<float> coeffs;
  std::vector<float> bias;
  std::size_t groups;

  ConvCase(std::size_t in, std::size_t out, std::size_t k, std::size_t groups, std::size_t side)
      : x(noise({1, in, side, side}, 1)),
        coeffs(noise({out, in / groups, k, k}, 2)),
        bias(out, 0.1f),
        groups(groups) {}

  smx::ops::ConvWeight<float> weight() const { return {coeffs, bias, groups}; }
  double macs() const {
    return static_cast<double>(coeffs.size()) * static_cast<double>(x.h() * x.w());
  }
};

// Args: channels, kernel, depth-wise flag, side.
ConvCase make_case(const benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const bool depthwise = state.range(2) != 0;
  const auto side = static_cast<std::size_t>(state.range(3));
  return ConvCase(d, d, k, depthwise ? d : 1, side);
}

template <bool Parallel>
void BM_Conv(benchmark::State& state) {
  const ConvCase c = make_case(state);
  for (auto _ : state) {
    auto y = Parallel ? smx::ops::conv2d(c.x, c.weight()) : smx::reference::conv2d(c.x, c.weight());
    benchmark::DoNotOptimize(y.data().data());
  }
  state.counters["MAC/s"] = benchmark::Counter(c.macs(), benchmark::Counter::kIsIterationInvariantRate);
}

template <bool Parallel>
void BM_ConvBackward(benchmark::State& state) {
  const ConvCase c = make_case(state);
  const Tensor4<float> dy = noise(c.x.shape(), 3);
  for (auto _ : state) {
    auto g = Parallel ? smx::ops::conv2d_vjp(c.x, c.weight(), dy)
                      : smx::reference::conv2d_vjp(c.x, c.weight(), dy);
    benchmark::DoNotOptimize(g.coeffs.data().data());
  }
}

template <bool Parallel>
void BM_LayerNorm(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto side = static_cast<std::size_t>(state.range(1));
  const Tensor4<float> x = noise({1, d, side, side}, 4);
  const std::vector<float> gamma(d, 1.0f);
  const smx::ops::NormWeight<float> w{gamma};
  for (auto _ : state) {
    auto y = Parallel ? smx::ops::layer_norm_channels(x, w) : smx::reference::layer_norm_channels(x, w);
    benchmark::DoNotOptimize(y.data().data());
  }
}

void BM_TinyForward(benchmark::State& state) {
  const auto cfg = smx::model::ModelConfig::tiny(4);
  const auto tree = smx::model::build(cfg, 0);
  const auto side = static_cast<std::size_t>(state.range(0));
  const Tensor4<float> lr = noise({1, 3, side, side}, 5);
  for (auto _ : state) {
    auto sr = smx::model::forward(tree, cfg, lr);
    benchmark::DoNotOptimize(sr.data().data());
  }
}

void conv_args(benchmark::internal::Benchmark* b) {
  b->ArgNames({"D", "k", "dw", "side"});
  b->Args({32, 3, 0, 64});
  b->Args({64, 1, 0, 64});
  b->Args({64, 7, 1, 64});
  b->Args({64, 13, 1, 64});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Conv<true>)->Name("Conv/openmp")->Apply(conv_args);
BENCHMARK(BM_Conv<false>)->Name("Conv/serial")->Apply(conv_args);
BENCHMARK(BM_ConvBackward<true>)->Name("ConvBackward/openmp")->Apply(conv_args);
BENCHMARK(BM_ConvBackward<false>)->Name("ConvBackward/serial")->Apply(conv_args);
BENCHMARK(BM_LayerNorm<true>)->Name("LayerNorm/openmp")->Args({64, 128})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LayerNorm<false>)->Name("LayerNorm/serial")->Args({64, 128})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TinyForward)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
