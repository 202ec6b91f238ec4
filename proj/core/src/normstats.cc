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

#include "freqnorm/normstats.h"

#include <cmath>
#include <string>

#include "freqnorm/errors.h"

namespace freqnorm {

std::string_view to_string(NormScheme scheme) {
  switch (scheme) {
    case NormScheme::kBatch: return "batch";
    case NormScheme::kInstance: return "instance";
    case NormScheme::kLayer: return "layer";
  }
  return "batch";
}

NormScheme parse_norm_scheme(std::string_view text) {
  if (text == "batch" || text == "bn") return NormScheme::kBatch;
  if (text == "instance" || text == "in") return NormScheme::kInstance;
  if (text == "layer" || text == "ln") return NormScheme::kLayer;
  throw ConfigError("unknown normalization scheme '" + std::string(text) + "'");
}

RunningStats::RunningStats(std::size_t channels, double momentum)
    : momentum_(momentum),
      mean_(Tensor::zeros({1, channels, 1, 1})),
      var_(Tensor::full({1, channels, 1, 1}, 1.0)),
      count_(Tensor::zeros({1, 1, 1, 1})) {
  if (!(momentum >= 0.0 && momentum <= 1.0)) {
    throw ConfigError("running-stats momentum must lie in [0, 1], got " +
                      std::to_string(momentum));
  }
}

void RunningStats::update(std::span<const double> batch_mean,
                          std::span<const double> batch_var) {
  if (batch_mean.size() != channels() || batch_var.size() != channels()) {
    throw ShapeError("running stats update: channel count mismatch");
  }
  count_[0] += 1.0;
  // Cumulative average: weight of the newest sample is 1/k.
  const double m = cumulative() ? 1.0 / count_[0] : momentum_;
  for (std::size_t c = 0; c < channels(); ++c) {
    mean_[c] = (1.0 - m) * mean_[c] + m * batch_mean[c];
    var_[c] = (1.0 - m) * var_[c] + m * batch_var[c];
  }
}

std::size_t NormStats::group_of(std::size_t n, std::size_t c) const {
  switch (scheme) {
    case NormScheme::kBatch: return c;
    case NormScheme::kInstance: return n * shape.c + c;
    case NormScheme::kLayer: return n;
  }
  return 0;
}

std::size_t NormStats::group_size() const {
  switch (scheme) {
    case NormScheme::kBatch: return shape.n * shape.plane();
    case NormScheme::kInstance: return shape.plane();
    case NormScheme::kLayer: return shape.c * shape.plane();
  }
  return 1;
}

namespace {

std::size_t groups_for(NormScheme scheme, const Shape& s) {
  switch (scheme) {
    case NormScheme::kBatch: return s.c;
    case NormScheme::kInstance: return s.n * s.c;
    case NormScheme::kLayer: return s.n;
  }
  return 1;
}

void fill_std(NormStats& st) {
  st.std.resize(st.var.size());
  for (std::size_t g = 0; g < st.var.size(); ++g) {
    st.std[g] = std::sqrt(st.var[g] + kNormEpsilon);
  }
}

void require_matching(const Tensor& t, const NormStats& stats, const char* op) {
  const Shape& s = t.shape();
  const bool ok = stats.scheme == NormScheme::kBatch
                      ? s.c == stats.group_count()
                      : (s == stats.shape);
  if (!ok) {
    throw ShapeError(std::string(op) + ": stats for " + stats.shape.str() +
                     " do not fit tensor " + s.str());
  }
}

}  // namespace

NormStats compute_stats(const Tensor& t, NormScheme scheme, Mode mode,
                        RunningStats* running) {
  const Shape& s = t.shape();
  NormStats st;
  st.scheme = scheme;
  st.shape = s;

  if (mode == Mode::kEval && scheme == NormScheme::kBatch) {
    if (running == nullptr) {
      throw ConfigError("eval-mode batch statistics need running estimates");
    }
    if (running->channels() != s.c) {
      throw ShapeError("running stats have " + std::to_string(running->channels()) +
                       " channels, tensor " + s.str());
    }
    st.mean.assign(running->mean().data().begin(), running->mean().data().end());
    st.var.assign(running->var().data().begin(), running->var().data().end());
    st.from_input = false;
    fill_std(st);
    return st;
  }

  const std::size_t groups = groups_for(scheme, s);
  st.mean.assign(groups, 0.0);
  st.var.assign(groups, 0.0);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      double& acc = st.mean[st.group_of(n, c)];
      for (double x : t.plane(n, c)) acc += x;
    }
  }
  const double count = static_cast<double>(st.group_size());
  for (double& m : st.mean) m /= count;
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t g = st.group_of(n, c);
      const double mu = st.mean[g];
      double& acc = st.var[g];
      for (double x : t.plane(n, c)) acc += (x - mu) * (x - mu);
    }
  }
  for (double& v : st.var) v /= count;
  fill_std(st);

  if (mode == Mode::kTrain && scheme == NormScheme::kBatch && running != nullptr) {
    running->update(st.mean, st.var);
  }
  return st;
}

Tensor normalize(const Tensor& t, const NormStats& stats) {
  require_matching(t, stats, "normalize");
  Tensor out = t;
  const Shape& s = t.shape();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t g = stats.group_of(n, c);
      const double mu = stats.mean[g];
      const double sd = stats.std[g];
      for (double& x : out.plane(n, c)) x = (x - mu) / sd;
    }
  }
  return out;
}

Tensor normalize_backward(const Tensor& grad_out, const Tensor& normalized,
                          const NormStats& stats, bool through_stats) {
  require_matching(grad_out, stats, "normalize_backward");
  const Shape& s = grad_out.shape();
  Tensor grad = grad_out;
  if (!through_stats || !stats.from_input) {
    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t c = 0; c < s.c; ++c) {
        const double sd = stats.std[stats.group_of(n, c)];
        for (double& g : grad.plane(n, c)) g /= sd;
      }
    }
    return grad;
  }
  // dx = (g - mean(g) - y * mean(g * y)) / std, per group.
  const std::size_t groups = stats.group_count();
  std::vector<double> mean_g(groups, 0.0), mean_gy(groups, 0.0);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t gi = stats.group_of(n, c);
      auto g = grad_out.plane(n, c);
      auto y = normalized.plane(n, c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        mean_g[gi] += g[i];
        mean_gy[gi] += g[i] * y[i];
      }
    }
  }
  const double count = static_cast<double>(stats.group_size());
  for (std::size_t gi = 0; gi < groups; ++gi) {
    mean_g[gi] /= count;
    mean_gy[gi] /= count;
  }
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t gi = stats.group_of(n, c);
      auto g = grad.plane(n, c);
      auto y = normalized.plane(n, c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = (g[i] - mean_g[gi] - y[i] * mean_gy[gi]) / stats.std[gi];
      }
    }
  }
  return grad;
}

}  // namespace freqnorm
