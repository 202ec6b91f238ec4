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

#ifndef FREQNORM_STYLETRANSFER_H_
#define FREQNORM_STYLETRANSFER_H_

#include <cstddef>
#include <string_view>

#include "freqnorm/tensor.h"

namespace freqnorm {

/// `raw` is the recomposed image before clipping; `image` is `raw` clipped
/// to [0, 1]; `clipped_fraction` counts the elements that were outside.
struct TransferResult {
  Tensor image;
  Tensor raw;
  double clipped_fraction = 0.0;
};

/// Per channel: IFT(compose(|FT(style)|, angle(FT(content)))).
/// ShapeError when the images differ in shape.
TransferResult amplitude_swap(const Tensor& content, const Tensor& style);

/// Amplitude (1 - ratio) * |FT(content)| + ratio * |FT(style)| under the
/// content phase. ratio 0 returns the content and ratio 1 the swap.
/// DomainError outside [0, 1].
TransferResult amplitude_mix(const Tensor& content, const Tensor& style, double ratio);

/// Swaps the amplitude only on bins whose signed frequencies satisfy
/// |fu|, |fv| <= floor(band * min(h, w) / 2), i.e. the centered low-frequency
/// square. DomainError unless band lies in (0, 0.5].
TransferResult low_freq_swap(const Tensor& content, const Tensor& style, double band);

/// Half-width of the low_freq_swap square for an h x w image.
std::size_t low_freq_half_width(std::size_t h, std::size_t w, double band);

/// Clips to [0, 1]; `fraction` (optional) receives the clipped share.
Tensor clip_unit(const Tensor& t, double* fraction = nullptr);

enum class TransferMode { kSwap, kMix, kLowFreq };
TransferMode parse_transfer_mode(std::string_view text);

}  // namespace freqnorm

#endif  // FREQNORM_STYLETRANSFER_H_
