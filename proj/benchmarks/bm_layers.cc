// Copyright 2026 The FreqNorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "freqnorm/freq_norms.h"
#include "freqnorm/model.h"
#include "freqnorm/nn_layers.h"
#include "freqnorm/rng.h"
#include "freqnorm/verification.h"

namespace freqnorm {
namespace {

constexpr Shape kFeature{32, 16, 16, 16};

template <typename L>
void forward_backward(benchmark::State& state, L& layer) {
  Rng rng(3);
  const Tensor x = random_normal(kFeature, rng, 1.0, 0.2);
  const Tensor g = random_normal(kFeature, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layer.forward(x, Mode::kTrain));
    if (state.range(0)) benchmark::DoNotOptimize(layer.backward(g));
  }
}

void BM_Norm2dBatch(benchmark::State& state) {
  Norm2d layer(NormScheme::kBatch, kFeature.c);
  forward_backward(state, layer);
}
BENCHMARK(BM_Norm2dBatch)->Arg(0)->Arg(1)->ArgName("backward");

void BM_PCNorm(benchmark::State& state) {
  PCNorm layer(kFeature.c);
  forward_backward(state, layer);
}
BENCHMARK(BM_PCNorm)->Arg(0)->Arg(1)->ArgName("backward");

void BM_CCNorm(benchmark::State& state) {
  CCNorm layer(kFeature.c);
  forward_backward(state, layer);
}
BENCHMARK(BM_CCNorm)->Arg(0)->Arg(1)->ArgName("backward");

void BM_SCNorm(benchmark::State& state) {
  SCNorm layer(kFeature.c);
  forward_backward(state, layer);
}
BENCHMARK(BM_SCNorm)->Arg(0)->Arg(1)->ArgName("backward");

void BM_Conv3x3(benchmark::State& state) {
  Conv2d layer({.in_channels = 16, .out_channels = 16, .kernel = 3, .stride = 1, .padding = 1});
  Rng rng(4);
  layer.init(rng);
  forward_backward(state, layer);
}
BENCHMARK(BM_Conv3x3)->Arg(0)->Arg(1)->ArgName("backward");

// One SGD-sized step of each variant at the default input size.
void BM_ModelStep(benchmark::State& state) {
  ModelSpec spec;
  spec.variant = static_cast<Variant>(state.range(0));
  Model model(spec, 1);
  Rng rng(5);
  const Tensor x = random_normal({32, 3, 32, 32}, rng, 0.25, 0.5);
  std::vector<int> labels(32);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % spec.classes);
  Tensor grad;
  for (auto _ : state) {
    model.zero_grad();
    softmax_cross_entropy(model.forward(x, Mode::kTrain), labels, &grad);
    model.backward(grad);
  }
  state.SetLabel(std::string(to_string(spec.variant)));
}
BENCHMARK(BM_ModelStep)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace freqnorm

BENCHMARK_MAIN();
