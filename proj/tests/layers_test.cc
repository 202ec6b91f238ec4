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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "freqnorm/adjust.h"
#include "freqnorm/errors.h"
#include "freqnorm/freq_norms.h"
#include "freqnorm/nn_layers.h"
#include "freqnorm/normstats.h"
#include "freqnorm/rng.h"
#include "oracles.h"

namespace freqnorm {
namespace {

using oracle::cplx;

NormStats batch_stats(const Tensor& t) {
  return compute_stats(t, NormScheme::kBatch, Mode::kTrain);
}

// Per channel: batch mean 0 and biased variance 1 - 1e-5, so the batch norm
// divisor sqrt(var + eps) is exactly 1 up to roundoff.
Tensor standardized(const Shape& s, std::mt19937_64& gen) {
  Tensor t = oracle::random_tensor(s, gen);
  const std::vector<double> m = oracle::channel_mean(t);
  for (std::size_t c = 0; c < s.c; ++c) {
    long double v = 0.0L;
    for (std::size_t n = 0; n < s.n; ++n)
      for (double& x : t.plane(n, c)) {
        x -= m[c];
        v += static_cast<long double>(x) * x;
      }
    v /= s.n * s.plane();
    const double k = std::sqrt((1.0 - 1e-5) / static_cast<double>(v));
    for (std::size_t n = 0; n < s.n; ++n)
      for (double& x : t.plane(n, c)) x *= k;
  }
  return t;
}

double max_amplitude_gap(const Tensor& a, const Tensor& b) {
  double gap = 0.0;
  for (std::size_t n = 0; n < a.shape().n; ++n)
    for (std::size_t c = 0; c < a.shape().c; ++c) {
      const auto A = oracle::dft_plane(a, n, c);
      const auto B = oracle::dft_plane(b, n, c);
      for (std::size_t i = 0; i < A.size(); ++i) {
        gap = std::max(gap, std::abs(std::abs(A[i]) - std::abs(B[i])));
      }
    }
  return gap;
}

// Largest phase difference over bins where both amplitudes exceed 1e-6.
double max_phase_gap(const Tensor& a, const Tensor& b) {
  double gap = 0.0;
  for (std::size_t n = 0; n < a.shape().n; ++n)
    for (std::size_t c = 0; c < a.shape().c; ++c) {
      const auto A = oracle::dft_plane(a, n, c);
      const auto B = oracle::dft_plane(b, n, c);
      for (std::size_t i = 0; i < A.size(); ++i) {
        if (std::abs(A[i]) <= 1e-6 || std::abs(B[i]) <= 1e-6) continue;
        gap = std::max(gap, std::abs(std::arg(A[i] * std::conj(B[i]))));
      }
    }
  return gap;
}

TEST(PCNormTest, StandardizedInputIsUnchanged) {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor x = standardized({2, 3, 8, 8}, gen);
    EXPECT_LE(max_abs_diff(pcnorm_forward(x, batch_stats(x)), x), 1e-6);
  }
}

TEST(PCNormTest, KeepsInputPhase) {
  std::mt19937_64 gen(42);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen, 2.0, 0.7);
  EXPECT_LE(max_phase_gap(pcnorm_forward(x, batch_stats(x)), x), 1e-8);
}

TEST(PCNormTest, InstallsBatchNormAmplitude) {
  std::mt19937_64 gen(43);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen, 2.0, 0.7);
  const Tensor bn = oracle::normalize(x, oracle::Groups::kBatch);
  EXPECT_LE(max_amplitude_gap(pcnorm_forward(x, batch_stats(x)), bn), 1e-9);
}

TEST(PCNormTest, NonPowerOfTwoSlices) {
  std::mt19937_64 gen(44);
  const Tensor x = oracle::random_tensor({2, 2, 5, 7}, gen, 1.0, -0.3);
  const Tensor out = pcnorm_forward(x, batch_stats(x));
  EXPECT_LE(max_amplitude_gap(out, oracle::normalize(x, oracle::Groups::kBatch)), 1e-9);
  EXPECT_LE(max_phase_gap(out, x), 1e-8);
}

TEST(ContentAdjustTest, Endpoints) {
  std::mt19937_64 gen(45);
  const Tensor f = oracle::random_tensor({2, 3, 4, 4}, gen, 1.0, 2.0);
  const NormStats st = batch_stats(f);
  EXPECT_EQ(content_adjust(f, st, 0.0), f);
  const Tensor full = content_adjust(f, st, 1.0);
  const std::vector<double> mu = oracle::channel_mean(f);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < 16; ++i) {
        EXPECT_NEAR(full.plane(n, c)[i], f.plane(n, c)[i] - mu[c], 1e-12);
      }
  const Tensor four = Tensor::full({1, 1, 3, 3}, 4.0);
  const Tensor half = content_adjust(four, batch_stats(four), 0.5);
  for (double x : half.data()) EXPECT_EQ(x, 2.0);
}

TEST(ContentAdjustTest, DcMovesLinearlyWithLambda) {
  std::mt19937_64 gen(46);
  const Tensor f = oracle::random_tensor({2, 2, 6, 6}, gen, 1.0, 1.5);
  const NormStats st = batch_stats(f);
  const std::vector<double> mu = oracle::channel_mean(f);
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Tensor p = content_adjust(f, st, lambda);
    for (std::size_t n = 0; n < 2; ++n)
      for (std::size_t c = 0; c < 2; ++c) {
        const auto F = oracle::dft_plane(f, n, c);
        const auto P = oracle::dft_plane(p, n, c);
        EXPECT_NEAR(P[0].real(), F[0].real() - lambda * mu[c], 1e-12);
        EXPECT_NEAR(P[0].imag(), 0.0, 1e-12);
        for (std::size_t i = 1; i < F.size(); ++i) EXPECT_LE(std::abs(P[i] - F[i]), 1e-12);
      }
  }
}

TEST(CCNormTest, LambdaEndpoints) {
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen, 1.5, 0.8);
    const NormStats st = batch_stats(x);
    EXPECT_LE(max_abs_diff(ccnorm_forward(x, st, 0.0), pcnorm_forward(x, st)), 1e-9);
    EXPECT_LE(max_abs_diff(ccnorm_forward(x, st, 1.0),
                           oracle::normalize(x, oracle::Groups::kBatch)),
              1e-9);
  }
}

TEST(CCNormTest, LayerInitAndEndpoints) {
  CCNorm layer(3);
  EXPECT_EQ(layer.adjust().temperature(), 1e-6);
  EXPECT_EQ(layer.adjust().lambda_norm(), 0.5);
  EXPECT_EQ(layer.adjust().lambda_org(), 0.5);
  std::mt19937_64 gen(48);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen, 1.0, 0.4);
  layer.adjust().freeze(0.0);  // lambda_norm = 1
  EXPECT_LE(max_abs_diff(layer.forward(x, Mode::kTrain),
                         oracle::normalize(x, oracle::Groups::kBatch)),
            1e-9);
}

TEST(AdjustParamsTest, PairSumsToOneInsideUnitInterval) {
  std::mt19937_64 gen(49);
  std::normal_distribution<double> nd(0.0, 10.0);
  for (double t : {1e-6, 0.1, 1.0, 7.5}) {
    AdjustParams a(t);
    EXPECT_EQ(a.pair(), std::make_pair(0.5, 0.5));
    for (int i = 0; i < 200; ++i) {
      a.raw()[0] = nd(gen);
      a.raw()[1] = nd(gen);
      if (i == 0) a.raw()[0] = 1e6;
      if (i == 1) a.raw()[1] = 1e6;
      const auto [ln, lo] = a.pair();
      EXPECT_LE(std::abs(ln + lo - 1.0), 1e-12);
      EXPECT_GT(ln, 0.0);
      EXPECT_LT(ln, 1.0);
      EXPECT_GT(lo, 0.0);
      EXPECT_LT(lo, 1.0);
    }
  }
}

TEST(AdjustParamsTest, SoftmaxOfRawOverTemperature) {
  AdjustParams a(0.1);
  a.raw()[0] = 0.03;
  a.raw()[1] = -0.05;
  const double e0 = std::exp(0.03 / 0.1), e1 = std::exp(-0.05 / 0.1);
  EXPECT_NEAR(a.lambda_norm(), e0 / (e0 + e1), 1e-15);
  EXPECT_NEAR(a.lambda_org(), e1 / (e0 + e1), 1e-15);
}

TEST(AdjustParamsTest, FreezeAndUnfreeze) {
  AdjustParams a(0.1);
  a.raw()[1] = 0.2;
  const auto learned = a.pair();
  a.freeze(1.0);
  EXPECT_TRUE(a.frozen());
  EXPECT_EQ(a.pair(), std::make_pair(0.0, 1.0));
  a.backward(1.0, 2.0);
  EXPECT_EQ(a.raw_grad()[0], 0.0);
  a.unfreeze();
  EXPECT_EQ(a.pair(), learned);
  EXPECT_THROW(a.freeze(1.5), DomainError);
  EXPECT_THROW(AdjustParams(0.0), ConfigError);
}

TEST(SCNormTest, ZeroLambdaIsExactIdentity) {
  std::mt19937_64 gen(50);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen);
  const NormStats st = compute_stats(x, NormScheme::kInstance, Mode::kTrain);
  EXPECT_EQ(scnorm_forward(x, st, 0.0, 1.0), x);
}

TEST(SCNormTest, FullLambdaInstallsInstanceNormAmplitude) {
  std::mt19937_64 gen(51);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen, 2.0, 1.0);
  const NormStats st = compute_stats(x, NormScheme::kInstance, Mode::kTrain);
  const Tensor out = scnorm_forward(x, st, 1.0, 0.0);
  EXPECT_LE(max_amplitude_gap(out, oracle::normalize(x, oracle::Groups::kInstance)), 1e-9);
}

TEST(SCNormTest, HalfLambdaGivesAmplitudeMidpoint) {
  std::mt19937_64 gen(52);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen, 2.0, 1.0);
  const NormStats st = compute_stats(x, NormScheme::kInstance, Mode::kTrain);
  const Tensor out = scnorm_forward(x, st, 0.5, 0.5);
  const Tensor in = oracle::normalize(x, oracle::Groups::kInstance);
  double gap = 0.0;
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 3; ++c) {
      const auto O = oracle::dft_plane(out, n, c);
      const auto A = oracle::dft_plane(x, n, c);
      const auto N = oracle::dft_plane(in, n, c);
      for (std::size_t i = 0; i < O.size(); ++i) {
        const double mid = 0.5 * (std::abs(A[i]) + std::abs(N[i]));
        gap = std::max(gap, std::abs(std::abs(O[i]) - mid));
      }
    }
  EXPECT_LE(gap, 1e-9);
  EXPECT_LE(max_phase_gap(out, x), 1e-8);
}

TEST(SCNormTest, LayerFrozenAtOrgOneIsBitIdentical) {
  std::mt19937_64 gen(53);
  SCNorm layer(3);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen);
  layer.adjust().freeze(1.0);
  EXPECT_EQ(layer.forward(x, Mode::kTrain), x);
  EXPECT_EQ(layer.forward(x, Mode::kEval), x);
}

TEST(FreqNormTest, ZeroInputGivesZeroOutput) {
  const Tensor z = Tensor::zeros({2, 3, 4, 4});
  PCNorm p(3);
  CCNorm c(3);
  SCNorm s(3);
  EXPECT_EQ(max_abs(p.forward(z, Mode::kTrain)), 0.0);
  EXPECT_EQ(max_abs(c.forward(z, Mode::kTrain)), 0.0);
  EXPECT_EQ(max_abs(s.forward(z, Mode::kTrain)), 0.0);
}

TEST(FreqNormTest, ForwardIsDeterministic) {
  std::mt19937_64 gen(54);
  const Tensor x = oracle::random_tensor({2, 3, 8, 8}, gen);
  PCNorm p1(3), p2(3);
  CCNorm c1(3), c2(3);
  SCNorm s1(3), s2(3);
  EXPECT_EQ(p1.forward(x, Mode::kTrain), p2.forward(x, Mode::kTrain));
  EXPECT_EQ(c1.forward(x, Mode::kTrain), c2.forward(x, Mode::kTrain));
  EXPECT_EQ(s1.forward(x, Mode::kTrain), s2.forward(x, Mode::kTrain));
}

TEST(FreqNormTest, BackwardWithoutForwardThrows) {
  PCNorm p(2);
  EXPECT_THROW(p.backward(Tensor::zeros({1, 2, 2, 2})), std::logic_error);
}

TEST(AffineTest, Cases) {
  const Tensor three = Tensor::full({1, 2, 2, 2}, 3.0);
  EXPECT_EQ(affine(three, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}), three);
  const Tensor seven = affine(three, std::vector<double>{2.0, 2.0}, std::vector<double>{1.0, 1.0});
  for (double x : seven.data()) EXPECT_EQ(x, 7.0);
  EXPECT_THROW(affine(three, std::vector<double>{1.0}, std::vector<double>{0.0, 0.0}),
               ShapeError);
}

// Direct zero-padded cross-correlation.
Tensor conv_reference(const Tensor& x, const Tensor& w, std::size_t stride, std::size_t pad) {
  const Shape s = x.shape();
  const std::size_t co = w.shape().n, k = w.shape().h;
  const std::size_t oh = (s.h + 2 * pad - k) / stride + 1, ow = (s.w + 2 * pad - k) / stride + 1;
  Tensor out = Tensor::zeros({s.n, co, oh, ow});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t o = 0; o < co; ++o)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x0 = 0; x0 < ow; ++x0) {
          double acc = 0.0;
          for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t i = 0; i < k; ++i)
              for (std::size_t j = 0; j < k; ++j) {
                const long yy = static_cast<long>(y * stride + i) - static_cast<long>(pad);
                const long xx = static_cast<long>(x0 * stride + j) - static_cast<long>(pad);
                if (yy < 0 || xx < 0 || yy >= static_cast<long>(s.h) ||
                    xx >= static_cast<long>(s.w))
                  continue;
                acc += w.at(o, c, i, j) * x.at(n, c, static_cast<std::size_t>(yy),
                                                static_cast<std::size_t>(xx));
              }
          out.at(n, o, y, x0) = acc;
        }
  return out;
}

TEST(Conv2dTest, IdentityOneByOne) {
  Conv2d conv({.in_channels = 3, .out_channels = 3, .kernel = 1});
  for (std::size_t c = 0; c < 3; ++c) conv.weight().at(c, c, 0, 0) = 1.0;
  std::mt19937_64 gen(55);
  const Tensor x = oracle::random_tensor({2, 3, 5, 5}, gen);
  EXPECT_EQ(conv.forward(x, Mode::kTrain), x);
}

TEST(Conv2dTest, ValidConvolutionShape) {
  Conv2d conv({.in_channels = 1, .out_channels = 2, .kernel = 3});
  EXPECT_EQ(conv.forward(Tensor::zeros({1, 1, 5, 5}), Mode::kTrain).shape(),
            (Shape{1, 2, 3, 3}));
  EXPECT_THROW(conv.forward(Tensor::zeros({1, 2, 5, 5}), Mode::kTrain), ShapeError);
}

TEST(Conv2dTest, MatchesDirectLoops) {
  std::mt19937_64 gen(56);
  for (auto [stride, pad] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 1}, {2, 0}}) {
    Conv2d conv({.in_channels = 3, .out_channels = 4, .kernel = 3, .stride = stride,
                 .padding = pad});
    Rng rng(7);
    conv.init(rng);
    const Tensor x = oracle::random_tensor({2, 3, 7, 6}, gen);
    EXPECT_LE(max_abs_diff(conv.forward(x, Mode::kTrain), conv_reference(x, conv.weight(), stride, pad)),
              1e-12);
  }
}

TEST(SimpleLayersTest, ReluPoolLinear) {
  ReLU relu;
  const Tensor r = relu.forward(Tensor::from_data({1, 1, 1, 2}, {-1.0, 2.0}), Mode::kTrain);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 2.0);

  MaxPool2d pool(2, 2);
  const Tensor p = pool.forward(
      Tensor::from_data({1, 1, 2, 4}, {1.0, 5.0, -2.0, -3.0, 4.0, 0.0, -1.0, -4.0}), Mode::kTrain);
  EXPECT_EQ(p.shape(), (Shape{1, 1, 1, 2}));
  EXPECT_EQ(p[0], 5.0);
  EXPECT_EQ(p[1], -1.0);

  GlobalAvgPool gap;
  const Tensor g = gap.forward(Tensor::from_data({1, 1, 2, 2}, {1.0, 2.0, 3.0, 6.0}), Mode::kTrain);
  EXPECT_EQ(g.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(g[0], 3.0);

  Linear fc(3, 2);
  fc.weight() = Tensor::from_data(fc.weight().shape(), {1.0, 2.0, 3.0, -1.0, 0.0, 1.0});
  fc.bias() = Tensor::from_data(fc.bias().shape(), {0.5, -0.5});
  const Tensor y = fc.forward(Tensor::from_data({1, 3, 1, 1}, {1.0, 1.0, 2.0}), Mode::kTrain);
  EXPECT_EQ(y.shape(), (Shape{1, 2, 1, 1}));
  EXPECT_EQ(y[0], 9.5);
  EXPECT_EQ(y[1], 0.5);
}

TEST(SimpleLayersTest, CrossEntropyAndPredict) {
  const Tensor logits = Tensor::from_data({2, 3, 1, 1}, {0.0, 0.0, 0.0, 1.0, 3.0, 3.0});
  const std::vector<int> labels = {2, 0};
  Tensor grad;
  const double loss = softmax_cross_entropy(logits, labels, &grad);
  const double l1 = -std::log(std::exp(1.0) / (std::exp(1.0) + 2.0 * std::exp(3.0)));
  EXPECT_NEAR(loss, 0.5 * (std::log(3.0) + l1), 1e-14);
  EXPECT_NEAR(grad[2], 0.5 * (1.0 / 3.0 - 1.0), 1e-15);
  EXPECT_EQ(predict(logits), (std::vector<int>{0, 1}));
}

// Loss = <w, layer(x)>; returns the analytic and numeric input gradients.
template <typename L>
double input_gradient_error(L& layer, Tensor x, Mode mode, std::mt19937_64& gen) {
  const Tensor w = oracle::random_tensor(layer.forward(x, mode).shape(), gen);
  layer.forward(x, mode);
  const Tensor analytic = layer.backward(w);
  auto loss = [&] { return oracle::dot(layer.forward(x, mode).data(), w.data()); };
  return oracle::relative_error(analytic.data(), oracle::numeric_gradient(loss, x.data()));
}

TEST(LayerGradientTest, LinearFourByFour) {
  std::mt19937_64 gen(57);
  Linear fc(16, 4);
  Rng rng(3);
  fc.init(rng);
  const Tensor x = oracle::random_tensor({2, 1, 4, 4}, gen);
  EXPECT_LE(input_gradient_error(fc, x, Mode::kTrain, gen), 1e-5);
  const Tensor w = oracle::random_tensor({2, 4, 1, 1}, gen);
  fc.zero_grad();
  fc.forward(x, Mode::kTrain);
  fc.backward(w);
  auto loss = [&] { return oracle::dot(fc.forward(x, Mode::kTrain).data(), w.data()); };
  const Tensor analytic = *fc.params()[0].grad;
  EXPECT_LE(oracle::relative_error(analytic.data(),
                                   oracle::numeric_gradient(loss, fc.weight().data())),
            1e-5);
}

TEST(LayerGradientTest, ConvAndPooling) {
  std::mt19937_64 gen(58);
  Conv2d conv({.in_channels = 2, .out_channels = 3, .kernel = 3, .stride = 2, .padding = 1});
  Rng rng(4);
  conv.init(rng);
  EXPECT_LE(input_gradient_error(conv, oracle::random_tensor({2, 2, 5, 5}, gen), Mode::kTrain, gen),
            1e-5);
  MaxPool2d pool(2, 2);
  EXPECT_LE(input_gradient_error(pool, oracle::random_tensor({1, 2, 4, 4}, gen), Mode::kTrain, gen),
            1e-5);
  GlobalAvgPool gap;
  EXPECT_LE(input_gradient_error(gap, oracle::random_tensor({2, 3, 3, 3}, gen), Mode::kTrain, gen),
            1e-5);
}

TEST(LayerGradientTest, FrequencyNormsInput) {
  std::mt19937_64 gen(59);
  for (int trial = 0; trial < 3; ++trial) {
    PCNorm p(2);
    EXPECT_LE(input_gradient_error(p, oracle::random_tensor({2, 2, 4, 4}, gen, 1.0, 0.5),
                                   Mode::kTrain, gen),
              1e-5);
    CCNorm c(2, 0.5);
    c.adjust().raw()[0] = 0.1;
    EXPECT_LE(input_gradient_error(c, oracle::random_tensor({2, 2, 4, 4}, gen, 1.0, 0.5),
                                   Mode::kTrain, gen),
              1e-5);
    SCNorm s(2);
    s.adjust().raw()[1] = 0.05;
    EXPECT_LE(input_gradient_error(s, oracle::random_tensor({1, 2, 4, 4}, gen, 1.0, 0.5),
                                   Mode::kTrain, gen),
              1e-5);
  }
}

TEST(LayerGradientTest, SCNormLambda) {
  std::mt19937_64 gen(60);
  for (NormScheme scheme : {NormScheme::kInstance, NormScheme::kLayer}) {
    SCNorm s(2, scheme);
    s.adjust().raw()[0] = 0.04;
    s.adjust().raw()[1] = -0.02;
    const Tensor x = oracle::random_tensor({1, 2, 4, 4}, gen, 1.5, 0.3);
    const Tensor w = oracle::random_tensor(x.shape(), gen);
    s.zero_grad();
    s.forward(x, Mode::kTrain);
    s.backward(w);
    const Tensor analytic = s.adjust().raw_grad();
    auto loss = [&] { return oracle::dot(s.forward(x, Mode::kTrain).data(), w.data()); };
    const auto numeric = oracle::numeric_gradient(loss, s.adjust().raw().data());
    EXPECT_GT(std::abs(numeric[0]), 1e-3);
    EXPECT_LE(oracle::relative_error(analytic.data(), numeric), 1e-5) << to_string(scheme);
  }
}

TEST(LayerGradientTest, CCNormLambdaGradientIsZero) {
  // lambda only moves the real DC bin, whose phase stays 0 or pi.
  std::mt19937_64 gen(61);
  CCNorm c(2, 0.5);
  c.adjust().raw()[1] = 0.3;
  const Tensor x = oracle::random_tensor({2, 2, 4, 4}, gen, 1.0, 0.5);
  const Tensor w = oracle::random_tensor(x.shape(), gen);
  c.zero_grad();
  c.forward(x, Mode::kTrain);
  c.backward(w);
  // Zero up to roundoff in the imaginary part of the DC bin.
  EXPECT_LE(std::abs(c.adjust().raw_grad()[0]), 1e-12);
  EXPECT_LE(std::abs(c.adjust().raw_grad()[1]), 1e-12);
  auto loss = [&] { return oracle::dot(c.forward(x, Mode::kTrain).data(), w.data()); };
  for (double g : oracle::numeric_gradient(loss, c.adjust().raw().data())) {
    EXPECT_LE(std::abs(g), 1e-7);
  }
}

TEST(LayerGradientTest, PCNormOnStandardizedInputPassesGradientThrough) {
  // With the statistics held fixed the layer is the identity map near a
  // standardized input, so its input gradient is the upstream gradient.
  std::mt19937_64 gen(62);
  PCNorm p(3);
  p.set_stop_grad_stats(true);
  const Tensor x = standardized({2, 3, 8, 8}, gen);
  const Tensor upstream = oracle::random_tensor(x.shape(), gen);
  p.forward(x, Mode::kTrain);
  EXPECT_LE(max_abs_diff(p.backward(upstream), upstream), 1e-6);
}

}  // namespace
}  // namespace freqnorm
