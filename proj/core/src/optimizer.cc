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

#include "freqnorm/optimizer.h"

#include <cmath>
#include <numbers>

#include "freqnorm/errors.h"

namespace freqnorm {

Sgd::Sgd(std::vector<ParamRef> params, const SgdConfig& config)
    : params_(std::move(params)), config_(config) {
  if (!(config.lr >= 0.0) || !(config.momentum >= 0.0 && config.momentum < 1.0) ||
      !(config.weight_decay >= 0.0)) {
    throw ConfigError("sgd: lr and weight decay must be >= 0, momentum in [0, 1)");
  }
  buffers_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    buffers_[i].assign(params_[i].value->numel(), 0.0);
  }
}

void Sgd::step() {
  const double m = config_.momentum;
  const double wd = config_.weight_decay;
  const double lr = config_.lr;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto p = params_[i].value->data();
    auto g = params_[i].grad->data();
    auto& buf = buffers_[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      double d = g[k] + wd * p[k];
      if (m != 0.0) {
        buf[k] = started_ ? m * buf[k] + d : d;
        d = config_.nesterov ? d + m * buf[k] : buf[k];
      }
      p[k] -= lr * d;
    }
  }
  started_ = true;
}

double cosine_lr(double base_lr, double min_lr, std::size_t epoch,
                 std::size_t total_epochs) {
  if (total_epochs == 0) return base_lr;
  const double t = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + std::cos(std::numbers::pi * t));
}

}  // namespace freqnorm
