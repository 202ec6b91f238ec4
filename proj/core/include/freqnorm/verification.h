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

#ifndef FREQNORM_VERIFICATION_H_
#define FREQNORM_VERIFICATION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "freqnorm/rng.h"
#include "freqnorm/tensor.h"

namespace freqnorm {

struct CheckResult {
  std::string name;
  std::size_t samples = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = true;

  /// Folds one measured error into the check. NaN fails.
  void record(double error);
};

struct SuiteReport {
  std::string name;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
  /// One line per check: "<suite> <check> samples=.. max_error=.. tol=.. PASS".
  std::string format() const;
};

struct GridSize {
  std::size_t h = 0;
  std::size_t w = 0;
};

/// "3x3,5x7" lists sizes; "3-16" expands to the squares 3x3 .. 16x16.
/// ConfigError on malformed text or zero dims.
std::vector<GridSize> parse_sizes(std::string_view text);

struct DerivationOptions {
  std::vector<GridSize> sizes = parse_sizes("3-16");
  std::size_t trials = 8;  // random tensors per size
  std::uint64_t seed = 0;
  /// Test hook: flips the sign of the mean term in the model of the
  /// normalized spectrum so the suite must fail.
  bool inject_bug = false;
};

/// Checks, per random f and constants (mu, sigma > 0.1):
///   spectrum_identity   FT((f - mu) / sigma) == (FT(f) - FT(mu 1)) / sigma
///   phase_scale         angle FT(f / sigma) == angle FT(f)  (amplitude > 1e-9)
///   mean_shift_dc       FT(f - mu) == FT(f) off the DC bin
///   amplitude_formula   |FT(f_norm)| == |FT(f) - FT(mu 1)| / sigma
///   phase_formula       angle FT(f_norm) == atan2 of the shifted parts
SuiteReport run_derivation_suite(const DerivationOptions& options);

/// Round trip idft2(compose(decompose(dft2(f)))) over `roundtrip_slices`
/// random slices, and the radix-2 path against the naive transform.
SuiteReport run_fft_suite(std::uint64_t seed, std::size_t roundtrip_slices = 1000);

/// Central finite differences (step 1e-6) against analytic backward for
/// every layer, including the spectral kernel and both adjust parameters.
SuiteReport run_gradient_suite(std::uint64_t seed, std::size_t instances = 10);

/// PCNorm / CCNorm / SCNorm endpoint identities on (2,3,8,8) inputs.
SuiteReport run_endpoint_suite(std::uint64_t seed, std::size_t instances = 20);

inline constexpr double kFiniteDifferenceStep = 1e-6;
inline constexpr double kGradientTolerance = 1e-5;

/// ||a - b|| / max(||a||, ||b||, 1e-7): the error measure used for
/// gradient checks.
double gradient_relative_error(const std::vector<double>& analytic,
                               const std::vector<double>& numeric);

/// Central-difference gradient of `loss` w.r.t. the selected coordinates
/// of `wrt` (restored afterwards).
std::vector<double> finite_difference(const std::function<double()>& loss, Tensor& wrt,
                                      const std::vector<std::size_t>& coords,
                                      double step = kFiniteDifferenceStep);

/// Up to `limit` distinct coordinates of a tensor with `numel` elements,
/// all of them when numel <= limit.
std::vector<std::size_t> sample_coords(std::size_t numel, std::size_t limit, Rng& rng);

/// Tensor of standard normal draws.
Tensor random_normal(const Shape& shape, Rng& rng, double scale = 1.0, double offset = 0.0);

}  // namespace freqnorm

#endif  // FREQNORM_VERIFICATION_H_
