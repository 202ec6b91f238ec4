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

#include "freqnorm/rng.h"
#include "freqnorm/spectral.h"
#include "freqnorm/verification.h"

namespace freqnorm {
namespace {

Grid random_grid(std::size_t side) {
  Rng rng(side);
  Grid g = Grid::zeros(side, side);
  for (double& x : g.v) x = rng.normal();
  return g;
}

void BM_Dft2Naive(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const ComplexGrid in = ComplexGrid::from_real(random_grid(side));
  for (auto _ : state) benchmark::DoNotOptimize(dft_naive(in, +1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dft2Naive)->RangeMultiplier(2)->Range(4, 32);

void BM_Fft2Fast(benchmark::State& state) {
  const Grid g = random_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fft2_fast(g));
}
BENCHMARK(BM_Fft2Fast)->RangeMultiplier(2)->Range(4, 64);

// Non power of two: falls back to the direct sum.
void BM_Dft2Fallback(benchmark::State& state) {
  const Grid g = random_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dft2(g));
}
BENCHMARK(BM_Dft2Fallback)->Arg(7)->Arg(12)->Arg(24);

void BM_RoundTrip(benchmark::State& state) {
  const Grid g = random_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(idft2(compose(decompose(dft2(g)))));
}
BENCHMARK(BM_RoundTrip)->Arg(8)->Arg(16)->Arg(32);

void BM_DerivationSuite(benchmark::State& state) {
  DerivationOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(run_derivation_suite(opt).passed());
}
BENCHMARK(BM_DerivationSuite)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace freqnorm

BENCHMARK_MAIN();
