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

#ifndef FREQNORM_MODEL_H_
#define FREQNORM_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "freqnorm/adjust.h"
#include "freqnorm/freq_norms.h"
#include "freqnorm/keyvalue.h"
#include "freqnorm/layer.h"
#include "freqnorm/nn_layers.h"
#include "freqnorm/normstats.h"
#include "freqnorm/rng.h"

namespace freqnorm {

enum class Variant { kBaseline, kDacP, kDacSc };

std::string_view to_string(Variant v);
/// Accepts "baseline", "dac_p", "dac_sc" (and dashed spellings).
Variant parse_variant(std::string_view text);

struct StageSpec {
  std::size_t blocks = 1;
  std::size_t channels = 16;
};

struct ModelSpec {
  Variant variant = Variant::kBaseline;
  std::vector<StageSpec> stages = {{1, 16}, {1, 32}, {1, 64}, {1, 128}};
  std::size_t in_channels = 3;
  std::size_t in_height = 32;
  std::size_t in_width = 32;
  std::size_t classes = 5;
  std::size_t stem_channels = 8;
  /// 1-based stage indices followed by an SCNorm (dac_sc only).
  std::vector<std::size_t> scnorm_positions = {1, 2, 3};
  NormScheme scnorm_scheme = NormScheme::kInstance;
  double content_temperature = kContentTemperature;
  double style_temperature = kStyleTemperature;
  double stats_momentum = kDefaultStatsMomentum;
  bool stop_grad_stats = false;

  /// Throws ConfigError on an unusable spec.
  void validate() const;

  void store(KeyValueFile& kv) const;
  static ModelSpec load(const KeyValueFile& kv);
};

enum class DownsampleKind { kBatchNorm, kPCNorm, kCCNorm };

/// 1x1 stride-2 convolution followed by BN, PCNorm or CCNorm.
class Downsample : public Layer {
 public:
  Downsample(std::size_t in_channels, std::size_t out_channels, DownsampleKind kind,
             const ModelSpec& spec);

  void init(Rng& rng) { conv_.init(rng); }
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

  DownsampleKind kind() const { return kind_; }
  Conv2d& conv() { return conv_; }
  Layer& norm() { return *norm_; }
  /// Null unless kind() == kCCNorm.
  CCNorm* ccnorm() { return ccnorm_; }

 private:
  DownsampleKind kind_;
  Conv2d conv_;
  std::unique_ptr<Layer> norm_;
  CCNorm* ccnorm_ = nullptr;
};

/// conv3x3-norm-relu-conv3x3-norm plus shortcut, then relu.
class BasicBlock : public Layer {
 public:
  BasicBlock(std::size_t in_channels, std::size_t out_channels, std::size_t stride,
             DownsampleKind kind, const ModelSpec& spec);

  void init(Rng& rng);
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

  Downsample* downsample() { return downsample_.get(); }

 private:
  Conv2d conv1_;
  Norm2d norm1_;
  ReLU relu1_;
  Conv2d conv2_;
  Norm2d norm2_;
  std::unique_ptr<Downsample> downsample_;
  ReLU relu_out_;
};

/// One learnable adjust pair in a model, for reporting and ablation.
struct AdjustSlot {
  std::string module;    // "ccnorm2", "scnorm3", ...
  std::string position;  // "stage2.downsample", "stage3.end", ...
  AdjustParams* params;
};

class Model {
 public:
  explicit Model(const ModelSpec& spec, std::uint64_t seed = 0);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelSpec& spec() const { return spec_; }

  /// (n, c, h, w) images -> (n, classes, 1, 1) logits.
  Tensor forward(const Tensor& x, Mode mode);
  /// Accumulates parameter gradients; returns dL/dx.
  Tensor backward(const Tensor& grad_logits);

  std::vector<ParamRef> parameters();
  std::vector<BufferRef> buffers();
  std::size_t parameter_count();
  void zero_grad();

  std::vector<AdjustSlot> adjust_slots();
  /// LookupError if no module has that name.
  AdjustSlot adjust(const std::string& module);

  /// Copies every parameter and buffer whose name exists in both models
  /// with the same shape. Returns how many tensors were copied.
  std::size_t copy_matching(Model& from);

  Downsample* downsample(std::size_t stage);
  SCNorm* scnorm(std::size_t stage);

 private:
  struct Stage {
    std::vector<std::unique_ptr<BasicBlock>> blocks;
    std::unique_ptr<SCNorm> scnorm;
  };

  ModelSpec spec_;
  Conv2d stem_conv_;
  Norm2d stem_norm_;
  ReLU stem_relu_;
  std::vector<Stage> stages_;
  GlobalAvgPool pool_;
  Linear fc_;
};

}  // namespace freqnorm

#endif  // FREQNORM_MODEL_H_
