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

#include "freqnorm/styletransfer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "freqnorm/errors.h"
#include "freqnorm/parallel.h"
#include "freqnorm/spectral.h"

namespace freqnorm {

namespace {

void require_same(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("style transfer: content " + a.shape().str() + " vs style " +
                     b.shape().str());
  }
}

// weight(k) in [0, 1] selects how much of the style amplitude bin k takes.
template <typename WeightFn>
Tensor transfer(const Tensor& content, const Tensor& style, WeightFn weight) {
  require_same(content, style);
  const Shape& s = content.shape();
  Tensor out = Tensor::zeros(s);
  parallel_for(s.n * s.c, [&](std::size_t i) {
    const std::size_t n = i / s.c, c = i % s.c;
    const SpectralPair pc = decompose(fft2_fast(slice(content, n, c)));
    const SpectralPair ps = decompose(fft2_fast(slice(style, n, c)));
    SpectralPair mixed = pc;
    for (std::size_t v = 0; v < s.h; ++v) {
      for (std::size_t u = 0; u < s.w; ++u) {
        const std::size_t k = v * s.w + u;
        const double r = weight(v, u);
        if (r == 1.0) {
          mixed.amplitude[k] = ps.amplitude[k];
        } else if (r != 0.0) {
          mixed.amplitude[k] = (1.0 - r) * pc.amplitude[k] + r * ps.amplitude[k];
        }
      }
    }
    set_slice(out, n, c, ifft2_fast(compose(mixed)));
  });
  return out;
}

TransferResult finish(Tensor raw) {
  TransferResult r;
  r.image = clip_unit(raw, &r.clipped_fraction);
  r.raw = std::move(raw);
  return r;
}

std::size_t signed_abs(std::size_t k, std::size_t n) { return k <= n / 2 ? k : n - k; }

}  // namespace

Tensor clip_unit(const Tensor& t, double* fraction) {
  Tensor out = t;
  std::size_t clipped = 0;
  for (double& v : out.data()) {
    if (v < 0.0 || v > 1.0) {
      ++clipped;
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  if (fraction) *fraction = static_cast<double>(clipped) / static_cast<double>(out.numel());
  return out;
}

TransferResult amplitude_swap(const Tensor& content, const Tensor& style) {
  return finish(transfer(content, style, [](std::size_t, std::size_t) { return 1.0; }));
}

TransferResult amplitude_mix(const Tensor& content, const Tensor& style, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw DomainError("amplitude_mix: ratio must lie in [0, 1], got " + std::to_string(ratio));
  }
  require_same(content, style);
  if (ratio == 0.0) return finish(content);
  if (ratio == 1.0) return amplitude_swap(content, style);
  return finish(transfer(content, style, [ratio](std::size_t, std::size_t) { return ratio; }));
}

std::size_t low_freq_half_width(std::size_t h, std::size_t w, double band) {
  return static_cast<std::size_t>(std::floor(band * static_cast<double>(std::min(h, w)) / 2.0));
}

TransferResult low_freq_swap(const Tensor& content, const Tensor& style, double band) {
  if (!(band > 0.0 && band <= 0.5)) {
    throw DomainError("low_freq_swap: band must lie in (0, 0.5], got " + std::to_string(band));
  }
  require_same(content, style);
  const Shape& s = content.shape();
  const std::size_t half = low_freq_half_width(s.h, s.w, band);
  return finish(transfer(content, style, [&](std::size_t v, std::size_t u) {
    return signed_abs(v, s.h) <= half && signed_abs(u, s.w) <= half ? 1.0 : 0.0;
  }));
}

TransferMode parse_transfer_mode(std::string_view text) {
  if (text == "swap") return TransferMode::kSwap;
  if (text == "mix") return TransferMode::kMix;
  if (text == "lowfreq") return TransferMode::kLowFreq;
  throw ConfigError("unknown style-transfer mode '" + std::string(text) +
                    "' (expected swap, mix or lowfreq)");
}

}  // namespace freqnorm
