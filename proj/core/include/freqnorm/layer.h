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

#ifndef FREQNORM_LAYER_H_
#define FREQNORM_LAYER_H_

#include <string>
#include <vector>

#include "freqnorm/normstats.h"
#include "freqnorm/tensor.h"

namespace freqnorm {

struct ParamRef {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

struct BufferRef {
  std::string name;
  Tensor* value;
};

/// A differentiable layer. forward() records what backward() needs (the
/// layer's entry on the tape); backward() consumes the most recent forward
/// and accumulates parameter gradients. Instances are single-writer.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Tensor forward(const Tensor& x, Mode mode) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;

  virtual void collect_params(const std::string& /*prefix*/,
                              std::vector<ParamRef>& /*out*/) {}
  virtual void collect_buffers(const std::string& /*prefix*/,
                               std::vector<BufferRef>& /*out*/) {}

  std::vector<ParamRef> params(const std::string& prefix = "");
  std::vector<BufferRef> buffers(const std::string& prefix = "");
  void zero_grad();
};

/// Throws std::logic_error if backward runs without a recorded forward.
void require_recorded(bool recorded, const char* layer);

/// Joins dotted parameter names, skipping an empty prefix.
std::string join_name(const std::string& prefix, const std::string& leaf);

}  // namespace freqnorm

#endif  // FREQNORM_LAYER_H_
