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

#ifndef FREQNORM_OPTIMIZER_H_
#define FREQNORM_OPTIMIZER_H_

#include <cstddef>
#include <vector>

#include "freqnorm/layer.h"

namespace freqnorm {

struct SgdConfig {
  double lr = 1e-4;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  bool nesterov = true;
};

/// SGD with optional Nesterov momentum and L2 weight decay:
///   g = grad + wd * p;  buf = m * buf + g;  p -= lr * (g + m * buf)
/// The first step seeds buf with g.
class Sgd {
 public:
  Sgd(std::vector<ParamRef> params, const SgdConfig& config);

  void step();
  void set_lr(double lr) { config_.lr = lr; }
  double lr() const { return config_.lr; }
  const SgdConfig& config() const { return config_; }

 private:
  std::vector<ParamRef> params_;
  SgdConfig config_;
  std::vector<std::vector<double>> buffers_;
  bool started_ = false;
};

/// Cosine annealing from `base_lr` to `min_lr` over `total_epochs`.
double cosine_lr(double base_lr, double min_lr, std::size_t epoch,
                 std::size_t total_epochs);

}  // namespace freqnorm

#endif  // FREQNORM_OPTIMIZER_H_
