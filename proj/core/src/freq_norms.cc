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

#include "freqnorm/freq_norms.h"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "freqnorm/errors.h"
#include "freqnorm/nn_layers.h"
#include "freqnorm/parallel.h"

namespace freqnorm {

namespace {

std::vector<double> magnitudes(const ComplexGrid& F) {
  std::vector<double> a(F.size());
  for (std::size_t k = 0; k < F.size(); ++k) a[k] = std::sqrt(F.re[k] * F.re[k] + F.im[k] * F.im[k]);
  return a;
}

}  // namespace

Tensor SpectralMix::forward(const Tensor& fn, const Tensor& p, double wn, double wo) {
  if (fn.shape() != p.shape()) {
    throw ShapeError("spectral mix: " + fn.shape().str() + " vs " + p.shape().str());
  }
  const Shape& s = fn.shape();
  shape_ = s;
  wn_ = wn;
  wo_ = wo;
  slices_.assign(s.n * s.c, Slice{});
  Tensor out = Tensor::zeros(s);
  parallel_for(slices_.size(), [&](std::size_t i) {
    const std::size_t n = i / s.c, c = i % s.c;
    const std::size_t m = s.plane();
    Slice& sl = slices_[i];
    sl.fn_spec = fft2_fast(slice(fn, n, c));
    sl.fn_amp = magnitudes(sl.fn_spec);
    sl.p_spec = fft2_fast(slice(p, n, c));
    sl.p_amp = magnitudes(sl.p_spec);
    sl.unit_re.assign(m, 1.0);
    sl.unit_im.assign(m, 0.0);
    sl.mixed_amp.resize(m);
    ComplexGrid mixed = ComplexGrid::zeros(s.h, s.w);
    for (std::size_t k = 0; k < m; ++k) {
      const double a = sl.p_amp[k];
      if (a != 0.0) {
        sl.unit_re[k] = sl.p_spec.re[k] / a;
        sl.unit_im[k] = sl.p_spec.im[k] / a;
      }
      const double amp = wn * sl.fn_amp[k] + wo * a;
      sl.mixed_amp[k] = amp;
      mixed.re[k] = amp * sl.unit_re[k];
      mixed.im[k] = amp * sl.unit_im[k];
    }
    set_slice(out, n, c, ifft2_fast(mixed));
  });
  return out;
}

SpectralMix::Grads SpectralMix::backward(const Tensor& grad_out) const {
  require_recorded(!slices_.empty(), "spectral mix");
  if (grad_out.shape() != shape_) {
    throw ShapeError("spectral mix backward: " + grad_out.shape().str() + " vs " +
                     shape_.str());
  }
  const Shape& s = shape_;
  Grads g;
  g.fn = Tensor::zeros(s);
  g.p = Tensor::zeros(s);
  std::vector<double> gwn(slices_.size(), 0.0), gwo(slices_.size(), 0.0);
  parallel_for(slices_.size(), [&](std::size_t i) {
    const std::size_t n = i / s.c, c = i % s.c;
    const std::size_t m = s.plane();
    const Slice& sl = slices_[i];
    const ComplexGrid G = idft2_backward(slice(grad_out, n, c));
    ComplexGrid g_fn = ComplexGrid::zeros(s.h, s.w);
    ComplexGrid g_p = ComplexGrid::zeros(s.h, s.w);
    double acc_n = 0.0, acc_o = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double ur = sl.unit_re[k], ui = sl.unit_im[k];
      // compose: d/d amplitude and d/d phase of amp * (ur, ui).
      const double g_amp = G.re[k] * ur + G.im[k] * ui;
      const double g_phase = sl.mixed_amp[k] * (G.im[k] * ur - G.re[k] * ui);
      acc_n += g_amp * sl.fn_amp[k];
      acc_o += g_amp * sl.p_amp[k];
      // decompose, with no gradient below the amplitude floor.
      const double afn = sl.fn_amp[k];
      if (wn_ != 0.0 && afn > kGradAmplitudeFloor) {
        const double ga = wn_ * g_amp;
        g_fn.re[k] = ga * sl.fn_spec.re[k] / afn;
        g_fn.im[k] = ga * sl.fn_spec.im[k] / afn;
      }
      const double ap = sl.p_amp[k];
      if (ap > kGradAmplitudeFloor) {
        const double ga = wo_ * g_amp;
        const double re = sl.p_spec.re[k], im = sl.p_spec.im[k];
        const double a2 = ap * ap;
        g_p.re[k] = ga * re / ap - g_phase * im / a2;
        g_p.im[k] = ga * im / ap + g_phase * re / a2;
      }
    }
    gwn[i] = acc_n;
    gwo[i] = acc_o;
    if (wn_ != 0.0) set_slice(g.fn, n, c, dft2_backward(g_fn));
    set_slice(g.p, n, c, dft2_backward(g_p));
  });
  for (std::size_t i = 0; i < slices_.size(); ++i) {
    g.wn += gwn[i];
    g.wo += gwo[i];
  }
  return g;
}

Tensor pcnorm_forward(const Tensor& f, const NormStats& stats) {
  SpectralMix mix;
  return mix.forward(normalize(f, stats), f, 1.0, 0.0);
}

Tensor content_adjust(const Tensor& f, const NormStats& stats, double lambda_norm) {
  const Shape& s = f.shape();
  if (s != stats.shape) {
    throw ShapeError("content_adjust: tensor " + s.str() + " vs stats " +
                     stats.shape.str());
  }
  Tensor out = f;
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const double shift = lambda_norm * stats.mean[stats.group_of(n, c)];
      for (double& v : out.plane(n, c)) v -= shift;
    }
  }
  return out;
}

Tensor ccnorm_forward(const Tensor& f, const NormStats& stats, double lambda_norm) {
  SpectralMix mix;
  return mix.forward(normalize(f, stats), content_adjust(f, stats, lambda_norm), 1.0,
                     0.0);
}

Tensor scnorm_forward(const Tensor& f, const NormStats& stats, double lambda_norm,
                      double lambda_org) {
  if (lambda_norm == 0.0) return f;
  SpectralMix mix;
  return mix.forward(normalize(f, stats), f, lambda_norm, lambda_org);
}

namespace {

void init_affine(std::size_t channels, Tensor& gamma, Tensor& gamma_grad, Tensor& beta,
                 Tensor& beta_grad) {
  gamma = Tensor::full({1, channels, 1, 1}, 1.0);
  gamma_grad = Tensor::zeros({1, channels, 1, 1});
  beta = Tensor::zeros({1, channels, 1, 1});
  beta_grad = Tensor::zeros({1, channels, 1, 1});
}

// Accumulates gamma/beta gradients and returns the gradient w.r.t. the
// pre-affine input.
Tensor affine_backward(const Tensor& grad_out, const Tensor& pre, const Tensor& gamma,
                       Tensor& gamma_grad, Tensor& beta_grad) {
  const Shape& s = grad_out.shape();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      auto g = grad_out.plane(n, c);
      auto x = pre.plane(n, c);
      double dg = 0.0, db = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        dg += g[i] * x[i];
        db += g[i];
      }
      gamma_grad[c] += dg;
      beta_grad[c] += db;
    }
  }
  return mul_per_channel(grad_out, gamma.data());
}

void push_affine(const std::string& prefix, Tensor& gamma, Tensor& gamma_grad,
                 Tensor& beta, Tensor& beta_grad, std::vector<ParamRef>& out) {
  out.push_back({join_name(prefix, "gamma"), &gamma, &gamma_grad});
  out.push_back({join_name(prefix, "beta"), &beta, &beta_grad});
}

void push_running(const std::string& prefix, RunningStats& running,
                  std::vector<BufferRef>& out) {
  out.push_back({join_name(prefix, "running_mean"), &running.mean()});
  out.push_back({join_name(prefix, "running_var"), &running.var()});
  out.push_back({join_name(prefix, "running_count"), &running.count()});
}

}  // namespace

// ---------------------------------------------------------------- PCNorm

PCNorm::PCNorm(std::size_t channels, bool affine, double momentum)
    : affine_(affine), running_(channels, momentum) {
  if (affine) init_affine(channels, gamma_, gamma_grad_, beta_, beta_grad_);
}

Tensor PCNorm::forward(const Tensor& x, Mode mode) {
  stats_ = compute_stats(x, NormScheme::kBatch, mode, &running_);
  normalized_ = normalize(x, stats_);
  mixed_ = mix_.forward(normalized_, x, 1.0, 0.0);
  recorded_ = true;
  return affine_ ? affine(mixed_, gamma_.data(), beta_.data()) : mixed_;
}

Tensor PCNorm::backward(const Tensor& grad_out) {
  require_recorded(recorded_, "pcnorm");
  const Tensor g = affine_ ? affine_backward(grad_out, mixed_, gamma_, gamma_grad_,
                                             beta_grad_)
                           : grad_out;
  SpectralMix::Grads mg = mix_.backward(g);
  return normalize_backward(mg.fn, normalized_, stats_, !stop_grad_stats_) + mg.p;
}

void PCNorm::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  if (affine_) push_affine(prefix, gamma_, gamma_grad_, beta_, beta_grad_, out);
}

void PCNorm::collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
  push_running(prefix, running_, out);
}

// ---------------------------------------------------------------- CCNorm

CCNorm::CCNorm(std::size_t channels, double temperature, bool affine, double momentum)
    : affine_(affine), adjust_(temperature), running_(channels, momentum) {
  if (affine) init_affine(channels, gamma_, gamma_grad_, beta_, beta_grad_);
}

Tensor CCNorm::forward(const Tensor& x, Mode mode) {
  stats_ = compute_stats(x, NormScheme::kBatch, mode, &running_);
  lambda_ = adjust_.lambda_norm();
  normalized_ = normalize(x, stats_);
  mixed_ = mix_.forward(normalized_, content_adjust(x, stats_, lambda_), 1.0, 0.0);
  recorded_ = true;
  return affine_ ? affine(mixed_, gamma_.data(), beta_.data()) : mixed_;
}

Tensor CCNorm::backward(const Tensor& grad_out) {
  require_recorded(recorded_, "ccnorm");
  const Tensor g = affine_ ? affine_backward(grad_out, mixed_, gamma_, gamma_grad_,
                                             beta_grad_)
                           : grad_out;
  SpectralMix::Grads mg = mix_.backward(g);
  const Shape& s = g.shape();

  // p = x - lambda * mu_c: dL/dlambda = -sum_c mu_c * sum(g_p over channel c).
  std::vector<double> channel_sum(s.c, 0.0);
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (double v : mg.p.plane(n, c)) channel_sum[c] += v;
    }
  }
  double g_lambda = 0.0;
  for (std::size_t c = 0; c < s.c; ++c) g_lambda -= channel_sum[c] * stats_.mean[c];
  adjust_.backward(g_lambda, 0.0);

  Tensor gx = normalize_backward(mg.fn, normalized_, stats_, !stop_grad_stats_) + mg.p;
  if (!stop_grad_stats_ && stats_.from_input) {
    const double count = static_cast<double>(stats_.group_size());
    for (std::size_t n = 0; n < s.n; ++n) {
      for (std::size_t c = 0; c < s.c; ++c) {
        const double shift = lambda_ * channel_sum[c] / count;
        for (double& v : gx.plane(n, c)) v -= shift;
      }
    }
  }
  return gx;
}

void CCNorm::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  if (affine_) push_affine(prefix, gamma_, gamma_grad_, beta_, beta_grad_, out);
  out.push_back({join_name(prefix, "lambda"), &adjust_.raw(), &adjust_.raw_grad()});
}

void CCNorm::collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
  push_running(prefix, running_, out);
}

// ---------------------------------------------------------------- SCNorm

SCNorm::SCNorm(std::size_t channels, NormScheme scheme, double temperature,
               bool affine, double momentum)
    : scheme_(scheme), affine_(affine), adjust_(temperature) {
  if (scheme == NormScheme::kBatch) running_ = RunningStats(channels, momentum);
  if (affine) init_affine(channels, gamma_, gamma_grad_, beta_, beta_grad_);
}

Tensor SCNorm::forward(const Tensor& x, Mode mode) {
  const double ln = adjust_.lambda_norm();
  const double lo = adjust_.lambda_org();
  stats_ = compute_stats(x, scheme_, mode,
                         scheme_ == NormScheme::kBatch ? &running_ : nullptr);
  identity_ = ln == 0.0;
  if (identity_) {
    mixed_ = x;
  } else {
    normalized_ = normalize(x, stats_);
    mixed_ = mix_.forward(normalized_, x, ln, lo);
  }
  recorded_ = true;
  return affine_ ? affine(mixed_, gamma_.data(), beta_.data()) : mixed_;
}

Tensor SCNorm::backward(const Tensor& grad_out) {
  require_recorded(recorded_, "scnorm");
  const Tensor g = affine_ ? affine_backward(grad_out, mixed_, gamma_, gamma_grad_,
                                             beta_grad_)
                           : grad_out;
  if (identity_) return g;
  SpectralMix::Grads mg = mix_.backward(g);
  adjust_.backward(mg.wn, mg.wo);
  return normalize_backward(mg.fn, normalized_, stats_, !stop_grad_stats_) + mg.p;
}

void SCNorm::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  if (affine_) push_affine(prefix, gamma_, gamma_grad_, beta_, beta_grad_, out);
  out.push_back({join_name(prefix, "lambda"), &adjust_.raw(), &adjust_.raw_grad()});
}

void SCNorm::collect_buffers(const std::string& prefix, std::vector<BufferRef>& out) {
  if (scheme_ == NormScheme::kBatch) push_running(prefix, running_, out);
}

}  // namespace freqnorm
