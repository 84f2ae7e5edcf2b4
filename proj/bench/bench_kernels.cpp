// Copyright 2026 The VEGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parallel kernels against their serial reference versions. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "vegan/kernels.hpp"
#include "vegan/rng.hpp"

namespace {

using vegan::kernels::ConvGeometry;

template <typename T>
std::vector<T> random_values(std::size_t n, std::uint64_t seed) {
  vegan::Rng rng(seed);
  std::vector<T> out(n);
  for (auto& v : out) v = static_cast<T>(rng.uniform(-1.0, 1.0));
  return out;
}

// Generator-like layer shapes: channels, spatial size, kernel, stride.
ConvGeometry geometry(const benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), s = static_cast<int>(state.range(1));
  return ConvGeometry::make(c, s, s, c, 3, 1, 1);
}

template <auto Kernel>
void conv_forward(benchmark::State& state) {
  const ConvGeometry g = geometry(state);
  const auto x = random_values<double>(g.input_size(), 1);
  const auto w = random_values<double>(g.weight_size(), 2);
  const auto b = random_values<double>(static_cast<std::size_t>(g.out_channels), 3);
  std::vector<double> y(g.output_size());
  for (auto _ : state) {
    Kernel(g, x, w, b, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.output_size()) * g.patch_size());
}

template <auto Kernel>
void conv_backward_input(benchmark::State& state) {
  const ConvGeometry g = geometry(state);
  const auto dy = random_values<double>(g.output_size(), 1);
  const auto w = random_values<double>(g.weight_size(), 2);
  std::vector<double> dx(g.input_size());
  for (auto _ : state) {
    Kernel(g, dy, w, dx);
    benchmark::DoNotOptimize(dx.data());
  }
}

template <auto Kernel>
void conv_backward_weight(benchmark::State& state) {
  const ConvGeometry g = geometry(state);
  const auto x = random_values<double>(g.input_size(), 1);
  const auto dy = random_values<double>(g.output_size(), 2);
  std::vector<double> dw(g.weight_size());
  for (auto _ : state) {
    Kernel(g, x, dy, dw);
    benchmark::DoNotOptimize(dw.data());
  }
}

template <auto Kernel>
void box_filter(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const auto src = random_values<float>(static_cast<std::size_t>(s) * s, 1);
  std::vector<float> dst(src.size());
  for (auto _ : state) {
    Kernel(src, s, s, 5, dst);
    benchmark::DoNotOptimize(dst.data());
  }
}

template <auto Kernel>
void upsample(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), s = static_cast<int>(state.range(1));
  const auto src = random_values<double>(static_cast<std::size_t>(c) * s * s, 1);
  std::vector<double> dst(src.size() * 4);
  for (auto _ : state) {
    Kernel(src, c, s, s, dst);
    benchmark::DoNotOptimize(dst.data());
  }
}

void conv_args(benchmark::internal::Benchmark* b) {
  b->Args({16, 64})->Args({64, 56})->Args({128, 28})->Unit(benchmark::kMillisecond);
}

}  // namespace

namespace k = vegan::kernels;
namespace ref = vegan::kernels::reference;

BENCHMARK(conv_forward<k::conv2d_forward>)->Name("conv2d_forward/parallel")->Apply(conv_args);
BENCHMARK(conv_forward<ref::conv2d_forward>)->Name("conv2d_forward/reference")->Apply(conv_args);
BENCHMARK(conv_backward_input<k::conv2d_backward_input>)->Name("conv2d_backward_input/parallel")->Apply(conv_args);
BENCHMARK(conv_backward_input<ref::conv2d_backward_input>)->Name("conv2d_backward_input/reference")->Apply(conv_args);
BENCHMARK(conv_backward_weight<k::conv2d_backward_weight>)->Name("conv2d_backward_weight/parallel")->Apply(conv_args);
BENCHMARK(conv_backward_weight<ref::conv2d_backward_weight>)
    ->Name("conv2d_backward_weight/reference")
    ->Apply(conv_args);
BENCHMARK(box_filter<k::box_filter_reflect>)->Name("box_filter/parallel")->Arg(224)->Arg(512);
BENCHMARK(box_filter<ref::box_filter_reflect>)->Name("box_filter/reference")->Arg(224)->Arg(512);
BENCHMARK(upsample<k::upsample2x>)->Name("upsample2x/parallel")->Args({64, 56})->Args({128, 112});
BENCHMARK(upsample<ref::upsample2x>)->Name("upsample2x/reference")->Args({64, 56})->Args({128, 112});

BENCHMARK_MAIN();
