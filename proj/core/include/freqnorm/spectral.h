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

#ifndef FREQNORM_SPECTRAL_H_
#define FREQNORM_SPECTRAL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "freqnorm/tensor.h"

namespace freqnorm {

// Transform convention used throughout the library:
//
//   F(u, v) = 1/(w*h) * sum_{x<w, y<h} f(x, y) * exp(+i*2*pi*(u*x/w + v*y/h))
//
// i.e. a positive exponent with the 1/(wh) factor on the forward transform,
// so F(0, 0) is the spatial mean. The inverse is the matching unnormalized
// negative-exponent sum. Bin (u, v) is stored at v*w + u, mirroring Grid.

/// Largest |imaginary part| an inverse transform may discard.
inline constexpr double kNonRealTolerance = 1e-9;
/// Bins at or below this amplitude get zero gradient through decompose.
inline constexpr double kGradAmplitudeFloor = 1e-8;

struct ComplexGrid {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> re;
  std::vector<double> im;

  static ComplexGrid zeros(std::size_t h, std::size_t w);
  static ComplexGrid from_real(const Grid& g);
  std::size_t size() const { return h * w; }
};

/// Amplitude/phase form of one spectrum. Phase lies in (-pi, pi]; bins of
/// exactly zero amplitude carry phase 0.
struct SpectralPair {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> amplitude;
  std::vector<double> phase;
};

bool is_power_of_two(std::size_t n);

/// Unnormalized transform, sign = +1 (forward kernel) or -1 (inverse
/// kernel). The naive variant is the direct O((hw)^2) double sum and serves
/// as the in-repo oracle for the fast one.
ComplexGrid dft_naive(const ComplexGrid& in, int sign);
/// Row-column radix-2 when both extents are powers of two; otherwise
/// delegates to dft_naive.
ComplexGrid dft_fast(const ComplexGrid& in, int sign);

/// Direct-summation transforms (reference path).
ComplexGrid dft2(const Grid& f);
/// Throws NonRealSignalError when the imaginary residue exceeds
/// kNonRealTolerance.
Grid idft2(const ComplexGrid& F);

/// Same contracts as dft2 / idft2 on the fast path.
ComplexGrid fft2_fast(const Grid& f);
Grid ifft2_fast(const ComplexGrid& F);

SpectralPair decompose(const ComplexGrid& F);
/// Throws DomainError on a negative amplitude.
ComplexGrid compose(const SpectralPair& p);

/// Angle difference wrapped into (-pi, pi].
double wrap_angle(double a);

// Reverse-mode rules. Gradients with respect to a ComplexGrid are carried as
// a ComplexGrid holding dL/dRe in `re` and dL/dIm in `im`.

/// dL/df for F = dft2(f) given dL/dF.
Grid dft2_backward(const ComplexGrid& grad_spectrum);
/// dL/dF for f = idft2(F) given dL/df.
ComplexGrid idft2_backward(const Grid& grad_signal);
/// dL/dF for (amplitude, phase) = decompose(F). Bins with amplitude at or
/// below kGradAmplitudeFloor receive zero gradient.
ComplexGrid decompose_backward(const ComplexGrid& F, const SpectralPair& pair,
                               std::span<const double> grad_amplitude,
                               std::span<const double> grad_phase);
/// dL/d(amplitude), dL/d(phase) for F = compose(pair).
void compose_backward(const SpectralPair& pair, const ComplexGrid& grad_spectrum,
                      std::vector<double>& grad_amplitude,
                      std::vector<double>& grad_phase);

}  // namespace freqnorm

#endif  // FREQNORM_SPECTRAL_H_
