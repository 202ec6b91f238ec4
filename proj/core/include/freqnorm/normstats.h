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

#ifndef FREQNORM_NORMSTATS_H_
#define FREQNORM_NORMSTATS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "freqnorm/tensor.h"

namespace freqnorm {

inline constexpr double kNormEpsilon = 1e-5;
inline constexpr double kDefaultStatsMomentum = 0.1;

/// Reduction groups: batch = per channel over (n,h,w); instance = per
/// (n,c) over (h,w); layer = per n over (c,h,w).
enum class NormScheme { kBatch, kInstance, kLayer };

enum class Mode { kTrain, kEval };

std::string_view to_string(NormScheme scheme);
/// Accepts "batch"/"bn", "instance"/"in", "layer"/"ln".
NormScheme parse_norm_scheme(std::string_view text);

/// Running per-channel estimates used by the batch scheme at inference.
///
/// momentum in (0, 1] gives the exponential update
///   running = (1 - momentum) * running + momentum * batch;
/// momentum == 0 selects a true cumulative average over all updates.
/// Values live in (1,C,1,1) tensors so they serialize like parameters.
class RunningStats {
 public:
  RunningStats() = default;
  explicit RunningStats(std::size_t channels,
                        double momentum = kDefaultStatsMomentum);

  void update(std::span<const double> batch_mean, std::span<const double> batch_var);

  std::size_t channels() const { return mean_.shape().c; }
  double momentum() const { return momentum_; }
  bool cumulative() const { return momentum_ == 0.0; }
  std::size_t updates() const { return static_cast<std::size_t>(count_[0]); }

  Tensor& mean() { return mean_; }
  const Tensor& mean() const { return mean_; }
  Tensor& var() { return var_; }
  const Tensor& var() const { return var_; }
  Tensor& count() { return count_; }

 private:
  double momentum_ = kDefaultStatsMomentum;
  Tensor mean_;
  Tensor var_;
  Tensor count_;
};

/// Per-group mean and std = sqrt(var + eps) for one tensor.
struct NormStats {
  NormScheme scheme = NormScheme::kBatch;
  Shape shape;
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> std;
  /// False when the values came from running estimates (no dependence on
  /// the input, so no gradient flows through them).
  bool from_input = true;

  std::size_t group_count() const { return mean.size(); }
  std::size_t group_of(std::size_t n, std::size_t c) const;
  std::size_t group_size() const;
};

/// Train mode computes from `t` and, for the batch scheme with `running`
/// given, updates the running estimates. Eval mode with the batch scheme
/// returns the running estimates (ConfigError when `running` is null).
/// Instance and layer schemes always compute from `t`.
NormStats compute_stats(const Tensor& t, NormScheme scheme, Mode mode,
                        RunningStats* running = nullptr);

/// (t - mean) / std per group.
Tensor normalize(const Tensor& t, const NormStats& stats);

/// dL/dt for y = normalize(t, stats). When `through_stats` is false (or the
/// stats did not come from the input) the statistics are treated as
/// constants.
Tensor normalize_backward(const Tensor& grad_out, const Tensor& normalized,
                          const NormStats& stats, bool through_stats = true);

}  // namespace freqnorm

#endif  // FREQNORM_NORMSTATS_H_
