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

#ifndef FREQNORM_FREQ_NORMS_H_
#define FREQNORM_FREQ_NORMS_H_

#include <cstddef>
#include <vector>

#include "freqnorm/adjust.h"
#include "freqnorm/layer.h"
#include "freqnorm/normstats.h"
#include "freqnorm/spectral.h"
#include "freqnorm/tensor.h"

namespace freqnorm {

/// The kernel shared by PCNorm, CCNorm and SCNorm. For every (n, c) slice:
///
///   out = IFT(compose(wn * |FT(fn)| + wo * |FT(p)|, angle(FT(p))))
///
/// `fn` supplies the normalized amplitude and `p` the phase (and the
/// original amplitude). forward() keeps the spectra needed by backward().
class SpectralMix {
 public:
  struct Grads {
    Tensor fn;
    Tensor p;
    double wn = 0.0;
    double wo = 0.0;
  };

  Tensor forward(const Tensor& fn, const Tensor& p, double wn, double wo);
  Grads backward(const Tensor& grad_out) const;

 private:
  // The phase of p is carried as the unit phasor FT(p) / |FT(p)|, which is
  // (1, 0) at zero amplitude like the angle convention of decompose().
  struct Slice {
    ComplexGrid fn_spec;
    std::vector<double> fn_amp;
    ComplexGrid p_spec;
    std::vector<double> p_amp;
    std::vector<double> unit_re;
    std::vector<double> unit_im;
    std::vector<double> mixed_amp;
  };

  Shape shape_;
  double wn_ = 0.0;
  double wo_ = 0.0;
  std::vector<Slice> slices_;
};

/// IFT(compose(|FT(normalize(f))|, angle(FT(f)))).
Tensor pcnorm_forward(const Tensor& f, const NormStats& stats);

/// f - lambda_norm * mean, per statistics group.
Tensor content_adjust(const Tensor& f, const NormStats& stats, double lambda_norm);

/// IFT(compose(|FT(normalize(f))|, angle(FT(content_adjust(f))))).
Tensor ccnorm_forward(const Tensor& f, const NormStats& stats, double lambda_norm);

/// IFT(compose(ln * |FT(normalize(f))| + lo * |FT(f)|, angle(FT(f)))).
/// Returns f unchanged when ln == 0.
Tensor scnorm_forward(const Tensor& f, const NormStats& stats, double lambda_norm,
                      double lambda_org);

/// Phase-consistent normalization over batch statistics, affine afterwards.
class PCNorm : public Layer {
 public:
  explicit PCNorm(std::size_t channels, bool affine = true,
                  double momentum = kDefaultStatsMomentum);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

  RunningStats& running() { return running_; }
  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  void set_stop_grad_stats(bool stop) { stop_grad_stats_ = stop; }

 private:
  bool affine_;
  bool stop_grad_stats_ = false;
  RunningStats running_;
  Tensor gamma_, gamma_grad_, beta_, beta_grad_;
  NormStats stats_;
  Tensor normalized_;
  Tensor mixed_;
  SpectralMix mix_;
  bool recorded_ = false;
};

/// PCNorm whose phase comes from f - lambda_norm * mean. The mean is the
/// batch mean in training and the running mean in eval.
class CCNorm : public Layer {
 public:
  explicit CCNorm(std::size_t channels, double temperature = kContentTemperature,
                  bool affine = true, double momentum = kDefaultStatsMomentum);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

  AdjustParams& adjust() { return adjust_; }
  RunningStats& running() { return running_; }
  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  void set_stop_grad_stats(bool stop) { stop_grad_stats_ = stop; }

 private:
  bool affine_;
  bool stop_grad_stats_ = false;
  AdjustParams adjust_;
  RunningStats running_;
  Tensor gamma_, gamma_grad_, beta_, beta_grad_;
  NormStats stats_;
  double lambda_ = 0.0;
  Tensor normalized_;
  Tensor mixed_;
  SpectralMix mix_;
  bool recorded_ = false;
};

/// Blends normalized and original amplitudes under the original phase.
class SCNorm : public Layer {
 public:
  SCNorm(std::size_t channels, NormScheme scheme = NormScheme::kInstance,
         double temperature = kStyleTemperature, bool affine = false,
         double momentum = kDefaultStatsMomentum);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) override;

  NormScheme scheme() const { return scheme_; }
  AdjustParams& adjust() { return adjust_; }
  RunningStats& running() { return running_; }
  void set_stop_grad_stats(bool stop) { stop_grad_stats_ = stop; }

 private:
  NormScheme scheme_;
  bool affine_;
  bool stop_grad_stats_ = false;
  AdjustParams adjust_;
  RunningStats running_;
  Tensor gamma_, gamma_grad_, beta_, beta_grad_;
  NormStats stats_;
  bool identity_ = false;
  Tensor normalized_;
  Tensor mixed_;
  SpectralMix mix_;
  bool recorded_ = false;
};

}  // namespace freqnorm

#endif  // FREQNORM_FREQ_NORMS_H_
