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

#ifndef FREQNORM_NN_LAYERS_H_
#define FREQNORM_NN_LAYERS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "freqnorm/layer.h"
#include "freqnorm/normstats.h"
#include "freqnorm/rng.h"

namespace freqnorm {

struct Conv2dConfig {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 0;
  bool bias = false;
};

/// Zero-padded 2D convolution (cross-correlation), im2col + GEMM.
class Conv2d : public Layer {
 public:
  explicit Conv2d(const Conv2dConfig& config);

  /// He-normal weights (fan-out, ReLU gain); zero bias.
  void init(Rng& rng);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;

  const Conv2dConfig& config() const { return config_; }
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }
  Shape output_shape(const Shape& in) const;

 private:
  Conv2dConfig config_;
  Tensor weight_;
  Tensor weight_grad_;
  Tensor bias_;
  Tensor bias_grad_;
  Shape in_shape_;
  std::vector<double> columns_;
};

/// Mean/variance normalization followed by an optional per-channel affine.
/// The batch scheme keeps running estimates for eval mode.
class Norm2d : public Layer {
 public:
  Norm2d(NormScheme scheme, std::size_t channels, bool affine = true,
         double momentum = kDefaultStatsMomentum);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

  NormScheme scheme() const { return scheme_; }
  RunningStats& running() { return running_; }
  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  void set_stop_grad_stats(bool stop) { stop_grad_stats_ = stop; }

 private:
  NormScheme scheme_;
  bool affine_;
  bool stop_grad_stats_ = false;
  RunningStats running_;
  Tensor gamma_, gamma_grad_, beta_, beta_grad_;
  NormStats stats_;
  Tensor normalized_;
  bool recorded_ = false;
};

class ReLU : public Layer {
 public:
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  Tensor input_;
};

class MaxPool2d : public Layer {
 public:
  MaxPool2d(std::size_t kernel, std::size_t stride);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  std::size_t kernel_, stride_;
  Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

/// (n,c,h,w) -> (n,c,1,1) spatial mean.
class GlobalAvgPool : public Layer {
 public:
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  Shape in_shape_;
};

/// Fully connected layer over the flattened (c,h,w) features; output is
/// (n, out_features, 1, 1).
class Linear : public Layer {
 public:
  Linear(std::size_t in_features, std::size_t out_features);

  /// Uniform(-1/sqrt(in), 1/sqrt(in)) for weight and bias.
  void init(Rng& rng);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  Tensor weight_, weight_grad_, bias_, bias_grad_;
  Tensor input_;
};

/// f * gamma + beta per channel.
Tensor affine(const Tensor& f, std::span<const double> gamma,
              std::span<const double> beta);

class Affine : public Layer {
 public:
  explicit Affine(std::size_t channels);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;

  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }

 private:
  Tensor gamma_, gamma_grad_, beta_, beta_grad_;
  Tensor input_;
};

/// Mean softmax cross-entropy over the batch for logits (n, k, 1, 1). When
/// `grad` is non-null it receives dLoss/dlogits.
double softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                             Tensor* grad = nullptr);

/// Row-wise argmax of (n, k, 1, 1) logits; ties resolve to the lower index.
std::vector<int> predict(const Tensor& logits);

}  // namespace freqnorm

#endif  // FREQNORM_NN_LAYERS_H_
