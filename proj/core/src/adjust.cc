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

#include "freqnorm/adjust.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "freqnorm/errors.h"

namespace freqnorm {

AdjustParams::AdjustParams(double temperature)
    : temperature_(temperature),
      raw_(Tensor::zeros({1, 1, 1, 2})),
      raw_grad_(Tensor::zeros({1, 1, 1, 2})) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be positive, got " +
                      std::to_string(temperature));
  }
}

// z = (raw_org - raw_norm) / T, so lambda_norm = 1 / (1 + exp(z)).
double AdjustParams::logit() const {
  return (raw_[1] - raw_[0]) / temperature_;
}

double AdjustParams::lambda_norm() const {
  if (frozen_) return frozen_->first;
  const double z = std::clamp(logit(), -kMaxAdjustLogit, kMaxAdjustLogit);
  return 1.0 / (1.0 + std::exp(z));
}

double AdjustParams::lambda_org() const {
  if (frozen_) return frozen_->second;
  return 1.0 - lambda_norm();
}

void AdjustParams::freeze(double lambda_org) {
  if (!(lambda_org >= 0.0 && lambda_org <= 1.0)) {
    throw DomainError("frozen lambda_org must lie in [0, 1], got " +
                      std::to_string(lambda_org));
  }
  frozen_ = std::make_pair(1.0 - lambda_org, lambda_org);
}

void AdjustParams::backward(double grad_norm, double grad_org) {
  if (frozen_) return;
  if (std::abs(logit()) > kMaxAdjustLogit) return;
  const double ln = lambda_norm();
  const double lo = 1.0 - ln;
  // lambda_org = 1 - lambda_norm folds its gradient in with a minus sign.
  const double d = (grad_norm - grad_org) * ln * lo / temperature_;
  raw_grad_[0] += d;
  raw_grad_[1] -= d;
}

}  // namespace freqnorm
