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

#include "freqnorm/nn_layers.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "freqnorm/errors.h"

namespace freqnorm {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMatrix = Eigen::Map<RowMatrix>;
using ConstMapMatrix = Eigen::Map<const RowMatrix>;

std::vector<ParamRef> Layer::params(const std::string& prefix) {
  std::vector<ParamRef> out;
  collect_params(prefix, out);
  return out;
}

std::vector<BufferRef> Layer::buffers(const std::string& prefix) {
  std::vector<BufferRef> out;
  collect_buffers(prefix, out);
  return out;
}

void Layer::zero_grad() {
  for (auto& p : params()) {
    std::fill(p.grad->data().begin(), p.grad->data().end(), 0.0);
  }
}

void require_recorded(bool recorded, const char* layer) {
  if (!recorded) {
    throw std::logic_error(std::string(layer) + ": backward without forward");
  }
}

std::string join_name(const std::string& prefix, const std::string& leaf) {
  return prefix.empty() ? leaf : prefix + "." + leaf;
}

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(const Conv2dConfig& config) : config_(config) {
  if (config.kernel == 0 || config.stride == 0) {
    throw ConfigError("conv2d: kernel and stride must be positive");
  }
  const Shape ws{config.out_channels, config.in_channels, config.kernel, config.kernel};
  weight_ = Tensor::zeros(ws);
  weight_grad_ = Tensor::zeros(ws);
  if (config.bias) {
    bias_ = Tensor::zeros({1, config.out_channels, 1, 1});
    bias_grad_ = Tensor::zeros({1, config.out_channels, 1, 1});
  }
}

void Conv2d::init(Rng& rng) {
  const double fan_out =
      static_cast<double>(config_.out_channels * config_.kernel * config_.kernel);
  const double sd = std::sqrt(2.0 / fan_out);
  for (double& w : weight_.data()) w = sd * rng.normal();
  if (config_.bias) std::fill(bias_.data().begin(), bias_.data().end(), 0.0);
}

Shape Conv2d::output_shape(const Shape& in) const {
  if (in.c != config_.in_channels) {
    throw ShapeError("conv2d: expected " + std::to_string(config_.in_channels) +
                     " input channels, got " + in.str());
  }
  const std::size_t k = config_.kernel, p = config_.padding, s = config_.stride;
  if (in.h + 2 * p < k || in.w + 2 * p < k) {
    throw ShapeError("conv2d: input " + in.str() + " smaller than kernel");
  }
  return Shape{in.n, config_.out_channels, (in.h + 2 * p - k) / s + 1,
               (in.w + 2 * p - k) / s + 1};
}

Tensor Conv2d::forward(const Tensor& x, Mode) {
  const Shape& in = x.shape();
  const Shape out_shape = output_shape(in);
  const std::size_t k = config_.kernel, s = config_.stride, p = config_.padding;
  const std::size_t oh = out_shape.h, ow = out_shape.w;
  const std::size_t rows = in.c * k * k;
  const std::size_t cols = in.n * oh * ow;

  columns_.assign(rows * cols, 0.0);
  for (std::size_t ci = 0; ci < in.c; ++ci) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        double* row = columns_.data() + ((ci * k + ky) * k + kx) * cols;
        for (std::size_t n = 0; n < in.n; ++n) {
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * s + ky) -
                                      static_cast<std::ptrdiff_t>(p);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * s + kx) -
                                        static_cast<std::ptrdiff_t>(p);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.w)) continue;
              row[(n * oh + oy) * ow + ox] = x.at(n, ci, iy, ix);
            }
          }
        }
      }
    }
  }

  ConstMapMatrix w(weight_.data().data(), config_.out_channels, rows);
  ConstMapMatrix col(columns_.data(), rows, cols);
  RowMatrix prod = w * col;

  Tensor out = Tensor::zeros(out_shape);
  const std::size_t plane = oh * ow;
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t co = 0; co < config_.out_channels; ++co) {
      const double b = config_.bias ? bias_[co] : 0.0;
      const double* src = prod.data() + co * cols + n * plane;
      auto dst = out.plane(n, co);
      for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] + b;
    }
  }
  in_shape_ = in;
  return out;
}

Tensor Conv2d::backward(const Tensor& grad_out) {
  require_recorded(!columns_.empty(), "conv2d");
  const Shape& in = in_shape_;
  const Shape out_shape = output_shape(in);
  if (grad_out.shape() != out_shape) {
    throw ShapeError("conv2d backward: gradient " + grad_out.shape().str() +
                     " vs output " + out_shape.str());
  }
  const std::size_t k = config_.kernel, s = config_.stride, p = config_.padding;
  const std::size_t oh = out_shape.h, ow = out_shape.w, plane = oh * ow;
  const std::size_t rows = in.c * k * k;
  const std::size_t cols = in.n * plane;
  const std::size_t co_count = config_.out_channels;

  RowMatrix g(co_count, cols);
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t co = 0; co < co_count; ++co) {
      auto src = grad_out.plane(n, co);
      std::copy(src.begin(), src.end(), g.data() + co * cols + n * plane);
    }
  }
  if (config_.bias) {
    for (std::size_t co = 0; co < co_count; ++co) bias_grad_[co] += g.row(co).sum();
  }

  ConstMapMatrix col(columns_.data(), rows, cols);
  MapMatrix wg(weight_grad_.data().data(), co_count, rows);
  wg.noalias() += g * col.transpose();

  ConstMapMatrix w(weight_.data().data(), co_count, rows);
  RowMatrix gcol = w.transpose() * g;

  Tensor grad_in = Tensor::zeros(in);
  for (std::size_t ci = 0; ci < in.c; ++ci) {
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const double* row = gcol.data() + ((ci * k + ky) * k + kx) * cols;
        for (std::size_t n = 0; n < in.n; ++n) {
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * s + ky) -
                                      static_cast<std::ptrdiff_t>(p);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * s + kx) -
                                        static_cast<std::ptrdiff_t>(p);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.w)) continue;
              grad_in.at(n, ci, iy, ix) += row[(n * oh + oy) * ow + ox];
            }
          }
        }
      }
    }
  }
  return grad_in;
}

void Conv2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({join_name(prefix, "weight"), &weight_, &weight_grad_});
  if (config_.bias) out.push_back({join_name(prefix, "bias"), &bias_, &bias_grad_});
}

// ---------------------------------------------------------------- Norm2d

Norm2d::Norm2d(NormScheme scheme, std::size_t channels, bool affine, double momentum)
    : scheme_(scheme), affine_(affine) {
  if (scheme == NormScheme::kBatch) running_ = RunningStats(channels, momentum);
  if (affine) {
    gamma_ = Tensor::full({1, channels, 1, 1}, 1.0);
    gamma_grad_ = Tensor::zeros({1, channels, 1, 1});
    beta_ = Tensor::zeros({1, channels, 1, 1});
    beta_grad_ = Tensor::zeros({1, channels, 1, 1});
  }
}

Tensor Norm2d::forward(const Tensor& x, Mode mode) {
  stats_ = compute_stats(x, scheme_, mode,
                         scheme_ == NormScheme::kBatch ? &running_ : nullptr);
  normalized_ = normalize(x, stats_);
  recorded_ = true;
  if (!affine_) return normalized_;
  return affine(normalized_, gamma_.data(), beta_.data());
}

Tensor Norm2d::backward(const Tensor& grad_out) {
  require_recorded(recorded_, "norm2d");
  Tensor g = grad_out;
  if (affine_) {
    const Shape& s = grad_out.shape();
    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t c = 0; c < s.c; ++c) {
        auto go = grad_out.plane(n, c);
        auto y = normalized_.plane(n, c);
        double dg = 0.0, db = 0.0;
        for (std::size_t i = 0; i < go.size(); ++i) {
          dg += go[i] * y[i];
          db += go[i];
        }
        gamma_grad_[c] += dg;
        beta_grad_[c] += db;
      }
    }
    g = mul_per_channel(grad_out, gamma_.data());
  }
  return normalize_backward(g, normalized_, stats_, !stop_grad_stats_);
}

void Norm2d::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  if (!affine_) return;
  out.push_back({join_name(prefix, "gamma"), &gamma_, &gamma_grad_});
  out.push_back({join_name(prefix, "beta"), &beta_, &beta_grad_});
}

void Norm2d::collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
  if (scheme_ != NormScheme::kBatch) return;
  out.push_back({join_name(prefix, "running_mean"), &running_.mean()});
  out.push_back({join_name(prefix, "running_var"), &running_.var()});
  out.push_back({join_name(prefix, "running_count"), &running_.count()});
}

// ---------------------------------------------------------------- ReLU

Tensor ReLU::forward(const Tensor& x, Mode) {
  input_ = x;
  Tensor out = x;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor ReLU::backward(const Tensor& grad_out) {
  require_recorded(!input_.empty(), "relu");
  if (grad_out.shape() != input_.shape()) throw ShapeError("relu backward: shape");
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.numel(); ++i) {
    if (!(input_[i] > 0.0)) g[i] = 0.0;
  }
  return g;
}

// ---------------------------------------------------------------- MaxPool2d

MaxPool2d::MaxPool2d(std::size_t kernel, std::size_t stride)
    : kernel_(kernel), stride_(stride) {
  if (kernel == 0 || stride == 0) throw ConfigError("maxpool: zero kernel/stride");
}

Tensor MaxPool2d::forward(const Tensor& x, Mode) {
  const Shape& in = x.shape();
  if (in.h < kernel_ || in.w < kernel_) {
    throw ShapeError("maxpool: input " + in.str() + " smaller than kernel");
  }
  const Shape os{in.n, in.c, (in.h - kernel_) / stride_ + 1,
                 (in.w - kernel_) / stride_ + 1};
  Tensor out = Tensor::zeros(os);
  argmax_.assign(os.numel(), 0);
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t c = 0; c < in.c; ++c) {
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_idx = x.index(n, c, oy * stride_, ox * stride_);
          for (std::size_t ky = 0; ky < kernel_; ++ky) {
            for (std::size_t kx = 0; kx < kernel_; ++kx) {
              const std::size_t idx = x.index(n, c, oy * stride_ + ky, ox * stride_ + kx);
              if (x[idx] > best) {
                best = x[idx];
                best_idx = idx;
              }
            }
          }
          const std::size_t o = out.index(n, c, oy, ox);
          out[o] = x[best_idx];
          argmax_[o] = best_idx;
        }
      }
    }
  }
  in_shape_ = in;
  return out;
}

Tensor MaxPool2d::backward(const Tensor& grad_out) {
  require_recorded(!argmax_.empty(), "maxpool");
  if (grad_out.numel() != argmax_.size()) throw ShapeError("maxpool backward: shape");
  Tensor g = Tensor::zeros(in_shape_);
  for (std::size_t o = 0; o < argmax_.size(); ++o) g[argmax_[o]] += grad_out[o];
  return g;
}

// ---------------------------------------------------------------- GlobalAvgPool

Tensor GlobalAvgPool::forward(const Tensor& x, Mode) {
  in_shape_ = x.shape();
  return mean(x, kAxisH | kAxisW);
}

Tensor GlobalAvgPool::backward(const Tensor& grad_out) {
  require_recorded(in_shape_.numel() != 0, "global_avg_pool");
  const Shape& s = in_shape_;
  if (grad_out.shape() != Shape{s.n, s.c, 1, 1}) {
    throw ShapeError("global_avg_pool backward: shape");
  }
  Tensor g = Tensor::zeros(s);
  const double inv = 1.0 / static_cast<double>(s.plane());
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const double v = grad_out.at(n, c, 0, 0) * inv;
      for (double& x : g.plane(n, c)) x = v;
    }
  }
  return g;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(std::size_t in_features, std::size_t out_features)
    : in_(in_features), out_(out_features) {
  weight_ = Tensor::zeros({out_, in_, 1, 1});
  weight_grad_ = Tensor::zeros({out_, in_, 1, 1});
  bias_ = Tensor::zeros({1, out_, 1, 1});
  bias_grad_ = Tensor::zeros({1, out_, 1, 1});
}

void Linear::init(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
  for (double& w : weight_.data()) w = rng.uniform(-bound, bound);
  for (double& b : bias_.data()) b = rng.uniform(-bound, bound);
}

Tensor Linear::forward(const Tensor& x, Mode) {
  const Shape& s = x.shape();
  if (s.c * s.h * s.w != in_) {
    throw ShapeError("linear: expected " + std::to_string(in_) +
                     " features, got " + s.str());
  }
  input_ = x;
  ConstMapMatrix in(x.data().data(), s.n, in_);
  ConstMapMatrix w(weight_.data().data(), out_, in_);
  Tensor out = Tensor::zeros({s.n, out_, 1, 1});
  MapMatrix o(out.data().data(), s.n, out_);
  o.noalias() = in * w.transpose();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t j = 0; j < out_; ++j) o(n, j) += bias_[j];
  }
  return out;
}

Tensor Linear::backward(const Tensor& grad_out) {
  require_recorded(!input_.empty(), "linear");
  const std::size_t n = input_.shape().n;
  if (grad_out.shape() != Shape{n, out_, 1, 1}) throw ShapeError("linear backward: shape");
  ConstMapMatrix g(grad_out.data().data(), n, out_);
  ConstMapMatrix in(input_.data().data(), n, in_);
  MapMatrix wg(weight_grad_.data().data(), out_, in_);
  wg.noalias() += g.transpose() * in;
  for (std::size_t j = 0; j < out_; ++j) bias_grad_[j] += g.col(j).sum();
  Tensor grad_in = Tensor::zeros(input_.shape());
  MapMatrix gi(grad_in.data().data(), n, in_);
  ConstMapMatrix w(weight_.data().data(), out_, in_);
  gi.noalias() = g * w;
  return grad_in;
}

void Linear::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({join_name(prefix, "weight"), &weight_, &weight_grad_});
  out.push_back({join_name(prefix, "bias"), &bias_, &bias_grad_});
}

// ---------------------------------------------------------------- Affine

Tensor affine(const Tensor& f, std::span<const double> gamma,
              std::span<const double> beta) {
  if (gamma.size() != f.shape().c || beta.size() != f.shape().c) {
    throw ShapeError("affine: gamma/beta length " + std::to_string(gamma.size()) +
                     "/" + std::to_string(beta.size()) + " for tensor " +
                     f.shape().str());
  }
  return add_per_channel(mul_per_channel(f, gamma), beta);
}

Affine::Affine(std::size_t channels)
    : gamma_(Tensor::full({1, channels, 1, 1}, 1.0)),
      gamma_grad_(Tensor::zeros({1, channels, 1, 1})),
      beta_(Tensor::zeros({1, channels, 1, 1})),
      beta_grad_(Tensor::zeros({1, channels, 1, 1})) {}

Tensor Affine::forward(const Tensor& x, Mode) {
  input_ = x;
  return affine(x, gamma_.data(), beta_.data());
}

Tensor Affine::backward(const Tensor& grad_out) {
  require_recorded(!input_.empty(), "affine");
  const Shape& s = input_.shape();
  if (grad_out.shape() != s) throw ShapeError("affine backward: shape");
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      auto g = grad_out.plane(n, c);
      auto x = input_.plane(n, c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        gamma_grad_[c] += g[i] * x[i];
        beta_grad_[c] += g[i];
      }
    }
  }
  return mul_per_channel(grad_out, gamma_.data());
}

void Affine::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({join_name(prefix, "gamma"), &gamma_, &gamma_grad_});
  out.push_back({join_name(prefix, "beta"), &beta_, &beta_grad_});
}

// ---------------------------------------------------------------- loss

double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                             Tensor* grad) {
  const Shape& s = logits.shape();
  if (s.h != 1 || s.w != 1 || labels.size() != s.n) {
    throw ShapeError("cross entropy: logits " + s.str() + " with " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t k = s.c;
  if (grad != nullptr) *grad = Tensor::zeros(s);
  double total = 0.0;
  for (std::size_t n = 0; n < s.n; ++n) {
    const int label = labels[n];
    if (label < 0 || static_cast<std::size_t>(label) >= k) {
      throw DomainError("cross entropy: label " + std::to_string(label) +
                        " outside [0, " + std::to_string(k) + ")");
    }
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) m = std::max(m, logits.at(n, j, 0, 0));
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(logits.at(n, j, 0, 0) - m);
    const double log_z = m + std::log(z);
    total += log_z - logits.at(n, static_cast<std::size_t>(label), 0, 0);
    if (grad != nullptr) {
      for (std::size_t j = 0; j < k; ++j) {
        const double p = std::exp(logits.at(n, j, 0, 0) - log_z);
        grad->at(n, j, 0, 0) =
            (p - (static_cast<std::size_t>(label) == j ? 1.0 : 0.0)) /
            static_cast<double>(s.n);
      }
    }
  }
  return total / static_cast<double>(s.n);
}

std::vector<int> predict(const Tensor& logits) {
  const Shape& s = logits.shape();
  std::vector<int> out(s.n, 0);
  for (std::size_t n = 0; n < s.n; ++n) {
    double best = logits.at(n, 0, 0, 0);
    for (std::size_t j = 1; j < s.c; ++j) {
      if (logits.at(n, j, 0, 0) > best) {
        best = logits.at(n, j, 0, 0);
        out[n] = static_cast<int>(j);
      }
    }
  }
  return out;
}

}  // namespace freqnorm
