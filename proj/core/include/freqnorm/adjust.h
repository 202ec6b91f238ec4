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

#ifndef FREQNORM_ADJUST_H_
#define FREQNORM_ADJUST_H_

#include <optional>
#include <utility>

#include "freqnorm/tensor.h"

namespace freqnorm {

/// Default temperatures for the content (CCNorm) and style (SCNorm) terms.
inline constexpr double kContentTemperature = 1e-6;
inline constexpr double kStyleTemperature = 1e-1;

/// Logit differences are clamped to +-kMaxAdjustLogit so both weights stay
/// strictly inside (0, 1) in double precision.
inline constexpr double kMaxAdjustLogit = 36.0;

/// Learnable 2-vector `raw` turned into the pair
///   (lambda_norm, lambda_org) = softmax(raw / temperature),
/// with lambda_org computed as 1 - lambda_norm. The pair can be frozen at a
/// fixed value, which detaches it from `raw`.
class AdjustParams {
 public:
  explicit AdjustParams(double temperature);

  double temperature() const { return temperature_; }

  /// (1,1,1,2): index 0 feeds lambda_norm, index 1 feeds lambda_org.
  Tensor& raw() { return raw_; }
  const Tensor& raw() const { return raw_; }
  Tensor& raw_grad() { return raw_grad_; }
  const Tensor& raw_grad() const { return raw_grad_; }

  double lambda_norm() const;
  double lambda_org() const;
  std::pair<double, double> pair() const { return {lambda_norm(), lambda_org()}; }

  /// Pins the pair at (1 - lambda_org, lambda_org). DomainError outside [0, 1].
  void freeze(double lambda_org);
  void unfreeze() { frozen_.reset(); }
  bool frozen() const { return frozen_.has_value(); }

  /// Chains dL/dlambda_norm and dL/dlambda_org into raw_grad. No-op while
  /// frozen or when the logit sits on the clamp.
  void backward(double grad_norm, double grad_org);

 private:
  double logit() const;

  double temperature_;
  Tensor raw_;
  Tensor raw_grad_;
  std::optional<std::pair<double, double>> frozen_;
};

}  // namespace freqnorm

#endif  // FREQNORM_ADJUST_H_
