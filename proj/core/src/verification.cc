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

#include "freqnorm/verification.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "freqnorm/errors.h"
#include "freqnorm/freq_norms.h"
#include "freqnorm/keyvalue.h"
#include "freqnorm/model.h"
#include "freqnorm/nn_layers.h"
#include "freqnorm/normstats.h"
#include "freqnorm/spectral.h"

namespace freqnorm {

void CheckResult::record(double error) {
  ++samples;
  if (std::isnan(error) || error > max_error) max_error = error;
  if (!(error <= tolerance)) passed = false;
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string SuiteReport::format() const {
  std::string out;
  char buf[256];
  for (const CheckResult& c : checks) {
    std::snprintf(buf, sizeof buf, "%s %-28s samples=%-6zu max_error=%-10.3e tol=%-8.1e %s\n",
                  name.c_str(), c.name.c_str(), c.samples, c.max_error, c.tolerance,
                  c.passed ? "PASS" : "FAIL");
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%s %s in %.2fs\n", name.c_str(),
                passed() ? "PASS" : "FAIL", seconds);
  out += buf;
  return out;
}

std::vector<GridSize> parse_sizes(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("sizes: empty list");
  std::vector<GridSize> out;
  const auto dash = t.find('-');
  if (dash != std::string::npos && t.find('x') == std::string::npos) {
    const std::size_t lo = parse_u64(t.substr(0, dash), "size range start");
    const std::size_t hi = parse_u64(t.substr(dash + 1), "size range end");
    if (lo == 0 || hi < lo) throw ConfigError("sizes: bad range '" + t + "'");
    for (std::size_t s = lo; s <= hi; ++s) out.push_back({s, s});
    return out;
  }
  for (const std::string& item : split(t, ',')) {
    const auto parts = split(trim(item), 'x');
    if (parts.size() != 2) throw ConfigError("sizes: expected HxW, got '" + item + "'");
    const GridSize g{parse_u64(parts[0], "height"), parse_u64(parts[1], "width")};
    if (g.h == 0 || g.w == 0) throw ConfigError("sizes: zero dimension in '" + item + "'");
    out.push_back(g);
  }
  return out;
}

Tensor random_normal(const Shape& shape, Rng& rng, double scale, double offset) {
  Tensor t = Tensor::zeros(shape);
  for (double& v : t.data()) v = offset + scale * rng.normal();
  return t;
}

double gradient_relative_error(const std::vector<double>& analytic,
                               const std::vector<double>& numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-7});
}

std::vector<double> finite_difference(const std::function<double()>& loss, Tensor& wrt,
                                      const std::vector<std::size_t>& coords, double step) {
  std::vector<double> out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double& v = wrt[coords[i]];
    const double saved = v;
    v = saved + step;
    const double up = loss();
    v = saved - step;
    const double down = loss();
    v = saved;
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

std::vector<std::size_t> sample_coords(std::size_t numel, std::size_t limit, Rng& rng) {
  std::vector<std::size_t> all(numel);
  std::iota(all.begin(), all.end(), 0);
  if (numel <= limit) return all;
  rng.shuffle(all);
  all.resize(limit);
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

CheckResult& check(SuiteReport& rep, const std::string& name, double tol) {
  for (CheckResult& c : rep.checks) {
    if (c.name == name) return c;
  }
  CheckResult c;
  c.name = name;
  c.tolerance = tol;
  rep.checks.push_back(c);
  return rep.checks.back();
}

double angle_diff(double a, double b) { return std::abs(wrap_angle(a - b)); }

Grid random_grid(std::size_t h, std::size_t w, Rng& rng, double scale, double offset) {
  Grid g = Grid::zeros(h, w);
  for (double& v : g.v) v = offset + scale * rng.normal();
  return g;
}

}  // namespace

// ---------------------------------------------------------------- derivation

SuiteReport run_derivation_suite(const DerivationOptions& options) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "derivation";
  rep.checks.reserve(5);
  CheckResult& identity = check(rep, "spectrum_identity", 1e-9);
  CheckResult& phase = check(rep, "phase_scale", 1e-10);
  CheckResult& locality = check(rep, "mean_shift_dc", 1e-12);
  CheckResult& amp_formula = check(rep, "amplitude_formula", 1e-9);
  CheckResult& phase_formula = check(rep, "phase_formula", 1e-9);
  // Capacity is reserved, so these references stay valid.

  Rng rng(derive_seed(options.seed, 0x64657269ULL));
  const double bug = options.inject_bug ? -1.0 : 1.0;
  for (const GridSize& size : options.sizes) {
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
      const double scale = rng.uniform(0.1, 10.0);
      const Grid f = random_grid(size.h, size.w, rng, scale, rng.uniform(-5.0, 5.0));
      const double mu = rng.uniform(-5.0, 5.0);
      const double sigma = rng.uniform(0.1, 5.0) + 1e-3;

      Grid fnorm = f, fshift = f, fscaled = f;
      for (std::size_t i = 0; i < f.v.size(); ++i) {
        fnorm.v[i] = (f.v[i] - mu) / sigma;
        fshift.v[i] = f.v[i] - mu;
        fscaled.v[i] = f.v[i] / sigma;
      }
      Grid fmu = Grid::zeros(size.h, size.w);
      std::fill(fmu.v.begin(), fmu.v.end(), mu);

      const ComplexGrid F = dft2(f);
      const ComplexGrid Fnorm = dft2(fnorm);
      const ComplexGrid Fmu = dft2(fmu);
      const ComplexGrid Fshift = dft2(fshift);
      const ComplexGrid Fscaled = dft2(fscaled);

      double e_id = 0.0, e_loc = 0.0, e_amp = 0.0, e_phase = 0.0, e_pf = 0.0;
      const SpectralPair P = decompose(F);
      const SpectralPair Pscaled = decompose(Fscaled);
      const SpectralPair Pnorm = decompose(Fnorm);
      for (std::size_t k = 0; k < F.size(); ++k) {
        const double re = (F.re[k] - bug * Fmu.re[k]) / sigma;
        const double im = (F.im[k] - bug * Fmu.im[k]) / sigma;
        e_id = std::max({e_id, std::abs(Fnorm.re[k] - re), std::abs(Fnorm.im[k] - im)});
        if (k != 0) {
          e_loc = std::max({e_loc, std::abs(Fshift.re[k] - F.re[k]),
                            std::abs(Fshift.im[k] - F.im[k])});
        }
        if (P.amplitude[k] > 1e-9 && Pscaled.amplitude[k] > 1e-9) {
          e_phase = std::max(e_phase, angle_diff(Pscaled.phase[k], P.phase[k]));
        }
        const double amp = std::hypot(re, im);
        e_amp = std::max(e_amp, std::abs(Pnorm.amplitude[k] - amp));
        if (amp > 1e-9) e_pf = std::max(e_pf, angle_diff(Pnorm.phase[k], std::atan2(im, re)));
      }
      identity.record(e_id);
      locality.record(e_loc);
      phase.record(e_phase);
      amp_formula.record(e_amp);
      phase_formula.record(e_pf);
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------- fft

SuiteReport run_fft_suite(std::uint64_t seed, std::size_t roundtrip_slices) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "fft";
  rep.checks.reserve(4);
  CheckResult& roundtrip = check(rep, "roundtrip", 1e-10);
  CheckResult& fast = check(rep, "fast_vs_naive", 1e-9);
  CheckResult& fast_inverse = check(rep, "fast_inverse_vs_naive", 1e-9);
  CheckResult& fallback = check(rep, "fallback_sizes", 1e-12);
  Rng rng(derive_seed(seed, 0x666674ULL));

  for (std::size_t i = 0; i < roundtrip_slices; ++i) {
    const std::size_t h = 1 + rng.index(16), w = 1 + rng.index(16);
    const Grid f = random_grid(h, w, rng, rng.uniform(0.1, 10.0), rng.uniform(-3.0, 3.0));
    const Grid back = idft2(compose(decompose(dft2(f))));
    double e = 0.0;
    for (std::size_t k = 0; k < f.v.size(); ++k) e = std::max(e, std::abs(back.v[k] - f.v[k]));
    roundtrip.record(e);
  }

  const std::size_t pow2[] = {1, 2, 4, 8, 16, 32};
  for (std::size_t h : pow2) {
    for (std::size_t w : pow2) {
      for (int trial = 0; trial < 3; ++trial) {
        const Grid f = random_grid(h, w, rng, 2.0, 0.5);
        const ComplexGrid a = fft2_fast(f), b = dft2(f);
        double e = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          const double mag = std::hypot(b.re[k], b.im[k]);
          if (mag < 1e-6) continue;
          e = std::max(e, std::hypot(a.re[k] - b.re[k], a.im[k] - b.im[k]) / mag);
        }
        fast.record(e);
        const Grid ia = ifft2_fast(b), ib = idft2(b);
        double ei = 0.0;
        for (std::size_t k = 0; k < ia.v.size(); ++k) {
          ei = std::max(ei, std::abs(ia.v[k] - ib.v[k]) / std::max(1.0, std::abs(ib.v[k])));
        }
        fast_inverse.record(ei);
      }
    }
  }
  // Non-power-of-two sizes must take the naive path and agree exactly.
  const GridSize odd[] = {{12, 12}, {3, 5}, {6, 8}, {7, 1}};
  for (const GridSize& s : odd) {
    const Grid f = random_grid(s.h, s.w, rng, 1.0, 0.0);
    const ComplexGrid a = fft2_fast(f), b = dft2(f);
    double e = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      e = std::max({e, std::abs(a.re[k] - b.re[k]), std::abs(a.im[k] - b.im[k])});
    }
    fallback.record(e);
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------- gradients

namespace {

constexpr std::size_t kInputCoords = 48;
constexpr std::size_t kParamCoords = 24;

double weighted_sum(const Tensor& y, const Tensor& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.numel(); ++i) s += y[i] * w[i];
  return s;
}

double min_slice_amplitude(const Tensor& x) {
  double m = std::numeric_limits<double>::infinity();
  const Shape& s = x.shape();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const SpectralPair p = decompose(fft2_fast(slice(x, n, c)));
      for (double a : p.amplitude) m = std::min(m, a);
    }
  }
  return m;
}

std::vector<double> pick(const Tensor& t, const std::vector<std::size_t>& coords) {
  std::vector<double> out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) out[i] = t[coords[i]];
  return out;
}

struct LayerCase {
  std::string name;
  std::function<std::unique_ptr<Layer>(Rng&)> make;
  Shape input;
  Mode mode = Mode::kTrain;
  bool spectral = false;   // reject inputs with near-zero spectral bins
  bool warmup = false;     // one train-mode forward before checking
  double offset = 0.0;     // input mean, to exercise mean-dependent paths
  // Parameters whose exact gradient is zero almost everywhere. They are
  // checked against the roundoff bound of the central difference instead of
  // a relative error, which has no meaning at zero.
  std::vector<std::string> flat_params = {};
};

// Bound on the central-difference error caused by rounding in the two loss
// evaluations: each carries at most a few ulps of sum |w_i y_i|.
double roundoff_bound(const Tensor& y, const Tensor& w, double step) {
  double mag = 0.0;
  for (std::size_t i = 0; i < y.numel(); ++i) mag += std::abs(y[i] * w[i]);
  return 16.0 * std::numeric_limits<double>::epsilon() * std::max(mag, 1.0) / step;
}

void check_layer(SuiteReport& rep, const LayerCase& lc, std::size_t instances, Rng& rng) {
  for (std::size_t inst = 0; inst < instances; ++inst) {
    std::unique_ptr<Layer> layer = lc.make(rng);
    if (lc.warmup) {
      layer->forward(random_normal(lc.input, rng, 1.5, lc.offset), Mode::kTrain);
    }
    Tensor x;
    for (int attempt = 0; attempt < 8; ++attempt) {
      x = random_normal(lc.input, rng, 1.0, lc.offset);
      if (!lc.spectral || min_slice_amplitude(x) >= 1e-6) break;
    }
    const Tensor y0 = layer->forward(x, lc.mode);
    const Tensor w = random_normal(y0.shape(), rng);

    layer->zero_grad();
    layer->forward(x, lc.mode);
    const Tensor gx = layer->backward(w);
    auto params = layer->params();
    std::vector<Tensor> pgrads;
    for (const ParamRef& p : params) pgrads.push_back(*p.grad);

    auto loss = [&] { return weighted_sum(layer->forward(x, lc.mode), w); };
    const auto xc = sample_coords(x.numel(), kInputCoords, rng);
    check(rep, lc.name + ".input", kGradientTolerance)
        .record(gradient_relative_error(pick(gx, xc), finite_difference(loss, x, xc)));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto pc = sample_coords(params[i].value->numel(), kParamCoords, rng);
      const std::string leaf = params[i].name.substr(params[i].name.rfind('.') + 1);
      if (std::find(lc.flat_params.begin(), lc.flat_params.end(), leaf) != lc.flat_params.end()) {
        const std::vector<double> a = pick(pgrads[i], pc);
        const std::vector<double> n = finite_difference(loss, *params[i].value, pc);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          worst = std::max({worst, std::abs(a[k]), std::abs(n[k])});
        }
        // Reported as a fraction of the bound, so the tolerance is 1.
        check(rep, lc.name + "." + leaf + ".flat", 1.0)
            .record(worst / roundoff_bound(y0, w, kFiniteDifferenceStep));
        continue;
      }
      check(rep, lc.name + "." + leaf, kGradientTolerance)
          .record(gradient_relative_error(pick(pgrads[i], pc),
                                          finite_difference(loss, *params[i].value, pc)));
    }
  }
}

void randomize_params(Layer& layer, Rng& rng, double scale) {
  for (ParamRef& p : layer.params()) {
    for (double& v : p.value->data()) v += scale * rng.normal();
  }
}

template <typename L>
std::unique_ptr<Layer> with_params(std::unique_ptr<L> layer, Rng& rng, double scale) {
  randomize_params(*layer, rng, scale);
  return layer;
}

void check_spectral_mix(SuiteReport& rep, std::size_t instances, Rng& rng) {
  const Shape shapes[] = {{2, 2, 8, 8}, {1, 2, 6, 5}};
  for (const Shape& s : shapes) {
    for (std::size_t inst = 0; inst < instances; ++inst) {
      Tensor fn = random_normal(s, rng), p = random_normal(s, rng, 1.0, 0.3);
      if (min_slice_amplitude(fn) < 1e-6 || min_slice_amplitude(p) < 1e-6) continue;
      Tensor weights = Tensor::from_data({1, 1, 1, 2}, {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)});
      SpectralMix mix;
      const Tensor w = random_normal(s, rng);
      mix.forward(fn, p, weights[0], weights[1]);
      const SpectralMix::Grads g = mix.backward(w);
      auto loss = [&] {
        SpectralMix m;
        return weighted_sum(m.forward(fn, p, weights[0], weights[1]), w);
      };
      const auto c1 = sample_coords(fn.numel(), kInputCoords, rng);
      check(rep, "spectral_mix.fn", kGradientTolerance)
          .record(gradient_relative_error(pick(g.fn, c1), finite_difference(loss, fn, c1)));
      const auto c2 = sample_coords(p.numel(), kInputCoords, rng);
      check(rep, "spectral_mix.p", kGradientTolerance)
          .record(gradient_relative_error(pick(g.p, c2), finite_difference(loss, p, c2)));
      check(rep, "spectral_mix.weights", kGradientTolerance)
          .record(gradient_relative_error({g.wn, g.wo}, finite_difference(loss, weights, {0, 1})));
    }
  }
}

void check_spectral_primitives(SuiteReport& rep, std::size_t instances, Rng& rng) {
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const std::size_t h = 2 + rng.index(7), w = 2 + rng.index(7);
    // dft2: L = sum(wr * re + wi * im).
    Tensor f = random_normal({1, 1, h, w}, rng);
    ComplexGrid G = ComplexGrid::zeros(h, w);
    for (std::size_t k = 0; k < G.size(); ++k) {
      G.re[k] = rng.normal();
      G.im[k] = rng.normal();
    }
    auto dft_loss = [&] {
      const ComplexGrid F = dft2(slice(f, 0, 0));
      double s = 0.0;
      for (std::size_t k = 0; k < F.size(); ++k) s += G.re[k] * F.re[k] + G.im[k] * F.im[k];
      return s;
    };
    const Grid gf = dft2_backward(G);
    const auto all = sample_coords(f.numel(), kInputCoords, rng);
    check(rep, "dft2", kGradientTolerance)
        .record(gradient_relative_error(pick(Tensor::from_data(f.shape(), gf.v), all),
                                        finite_difference(dft_loss, f, all)));

    // decompose: L = sum(wa * amplitude + wp * phase), F away from the cut.
    Tensor re = random_normal({1, 1, h, w}, rng), im = random_normal({1, 1, h, w}, rng);
    for (std::size_t k = 0; k < re.numel(); ++k) {
      if (std::abs(im[k]) < 1e-3 && re[k] < 0.0) im[k] = 0.1;
    }
    std::vector<double> wa(re.numel()), wp(re.numel());
    for (std::size_t k = 0; k < wa.size(); ++k) {
      wa[k] = rng.normal();
      wp[k] = rng.normal();
    }
    auto as_grid = [&] {
      ComplexGrid F = ComplexGrid::zeros(h, w);
      F.re.assign(re.data().begin(), re.data().end());
      F.im.assign(im.data().begin(), im.data().end());
      return F;
    };
    auto dec_loss = [&] {
      const SpectralPair P = decompose(as_grid());
      double s = 0.0;
      for (std::size_t k = 0; k < wa.size(); ++k) s += wa[k] * P.amplitude[k] + wp[k] * P.phase[k];
      return s;
    };
    const ComplexGrid F = as_grid();
    const ComplexGrid gF = decompose_backward(F, decompose(F), wa, wp);
    std::vector<double> analytic(gF.re);
    analytic.insert(analytic.end(), gF.im.begin(), gF.im.end());
    std::vector<double> numeric = finite_difference(dec_loss, re, sample_coords(re.numel(), re.numel(), rng));
    const auto ni = finite_difference(dec_loss, im, sample_coords(im.numel(), im.numel(), rng));
    numeric.insert(numeric.end(), ni.begin(), ni.end());
    check(rep, "decompose", kGradientTolerance).record(gradient_relative_error(analytic, numeric));

    // compose: L = sum(wr * re + wi * im) over compose(amplitude, phase).
    Tensor amp = random_normal({1, 1, h, w}, rng, 0.3, 1.0), ph = random_normal({1, 1, h, w}, rng);
    for (double& a : amp.data()) a = std::abs(a) + 0.1;
    auto pair = [&] {
      SpectralPair P;
      P.h = h;
      P.w = w;
      P.amplitude.assign(amp.data().begin(), amp.data().end());
      P.phase.assign(ph.data().begin(), ph.data().end());
      return P;
    };
    auto comp_loss = [&] {
      const ComplexGrid C = compose(pair());
      double s = 0.0;
      for (std::size_t k = 0; k < C.size(); ++k) s += G.re[k] * C.re[k] + G.im[k] * C.im[k];
      return s;
    };
    std::vector<double> ga, gp;
    compose_backward(pair(), G, ga, gp);
    std::vector<double> a2(ga);
    a2.insert(a2.end(), gp.begin(), gp.end());
    std::vector<double> n2 = finite_difference(comp_loss, amp, sample_coords(amp.numel(), amp.numel(), rng));
    const auto np = finite_difference(comp_loss, ph, sample_coords(ph.numel(), ph.numel(), rng));
    n2.insert(n2.end(), np.begin(), np.end());
    check(rep, "compose", kGradientTolerance).record(gradient_relative_error(a2, n2));

    // idft2 on a conjugate-symmetric spectrum, perturbed through its real
    // source so the spectrum stays symmetric.
    Tensor src = random_normal({1, 1, h, w}, rng);
    Tensor wy = random_normal({1, 1, h, w}, rng);
    auto idft_loss = [&] {
      const Grid y = idft2(dft2(slice(src, 0, 0)));
      double s = 0.0;
      for (std::size_t k = 0; k < y.v.size(); ++k) s += wy[k] * y.v[k];
      return s;
    };
    const Grid g_src = dft2_backward(idft2_backward(slice(wy, 0, 0)));
    const auto sc = sample_coords(src.numel(), kInputCoords, rng);
    check(rep, "idft2", kGradientTolerance)
        .record(gradient_relative_error(pick(Tensor::from_data(src.shape(), g_src.v), sc),
                                        finite_difference(idft_loss, src, sc)));
  }
}

void check_cross_entropy(SuiteReport& rep, std::size_t instances, Rng& rng) {
  for (std::size_t inst = 0; inst < instances; ++inst) {
    Tensor logits = random_normal({4, 5, 1, 1}, rng, 2.0);
    std::vector<int> labels(4);
    for (int& l : labels) l = static_cast<int>(rng.index(5));
    Tensor grad;
    softmax_cross_entropy(logits, labels, &grad);
    auto loss = [&] { return softmax_cross_entropy(logits, labels); };
    const auto c = sample_coords(logits.numel(), kInputCoords, rng);
    check(rep, "cross_entropy.logits", kGradientTolerance)
        .record(gradient_relative_error(pick(grad, c), finite_difference(loss, logits, c)));
  }
}

void check_model(SuiteReport& rep, Variant variant, std::size_t instances, Rng& rng) {
  ModelSpec spec;
  spec.variant = variant;
  spec.stages = {{1, 4}, {1, 6}};
  spec.in_channels = 2;
  spec.in_height = 8;
  spec.in_width = 8;
  spec.classes = 3;
  spec.stem_channels = 3;
  spec.scnorm_positions = {1};
  spec.content_temperature = 0.5;
  const std::string name = "model." + std::string(to_string(variant));
  for (std::size_t inst = 0; inst < instances; ++inst) {
    Model model(spec, rng.next_u64());
    for (const AdjustSlot& s : model.adjust_slots()) {
      for (double& v : s.params->raw().data()) v = 0.1 * rng.normal();
    }
    Tensor x = random_normal({3, 2, 8, 8}, rng, 1.0, 0.2);
    std::vector<int> labels(3);
    for (int& l : labels) l = static_cast<int>(rng.index(3));
    model.zero_grad();
    Tensor g;
    softmax_cross_entropy(model.forward(x, Mode::kTrain), labels, &g);
    const Tensor gx = model.backward(g);
    auto loss = [&] { return softmax_cross_entropy(model.forward(x, Mode::kTrain), labels); };
    const auto xc = sample_coords(x.numel(), kInputCoords, rng);
    check(rep, name + ".input", kGradientTolerance)
        .record(gradient_relative_error(pick(gx, xc), finite_difference(loss, x, xc)));
    std::vector<double> analytic, numeric;
    for (ParamRef& p : model.parameters()) {
      const auto pc = sample_coords(p.value->numel(), 6, rng);
      const auto a = pick(*p.grad, pc);
      const auto n = finite_difference(loss, *p.value, pc);
      analytic.insert(analytic.end(), a.begin(), a.end());
      numeric.insert(numeric.end(), n.begin(), n.end());
    }
    check(rep, name + ".params", kGradientTolerance)
        .record(gradient_relative_error(analytic, numeric));
  }
}

}  // namespace

SuiteReport run_gradient_suite(std::uint64_t seed, std::size_t instances) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "gradient";
  Rng rng(derive_seed(seed, 0x67726164ULL));

  std::vector<LayerCase> cases;
  cases.push_back({"conv3x3", [](Rng& r) {
                     auto c = std::make_unique<Conv2d>(Conv2dConfig{2, 3, 3, 1, 1, true});
                     c->init(r);
                     return with_params(std::move(c), r, 0.1);
                   }, {2, 2, 5, 5}});
  cases.push_back({"conv1x1_s2", [](Rng& r) {
                     auto c = std::make_unique<Conv2d>(Conv2dConfig{3, 4, 1, 2, 0, false});
                     c->init(r);
                     return std::unique_ptr<Layer>(std::move(c));
                   }, {2, 3, 6, 6}});
  cases.push_back({"relu", [](Rng&) { return std::unique_ptr<Layer>(new ReLU()); }, {2, 2, 4, 4}});
  cases.push_back({"maxpool", [](Rng&) { return std::unique_ptr<Layer>(new MaxPool2d(2, 2)); },
                   {2, 2, 6, 6}});
  cases.push_back({"global_avg_pool", [](Rng&) { return std::unique_ptr<Layer>(new GlobalAvgPool()); },
                   {2, 3, 4, 4}});
  cases.push_back({"linear", [](Rng& r) {
                     auto l = std::make_unique<Linear>(12, 4);
                     l->init(r);
                     return std::unique_ptr<Layer>(std::move(l));
                   }, {3, 3, 2, 2}});
  cases.push_back({"affine", [](Rng& r) { return with_params(std::make_unique<Affine>(3), r, 0.3); },
                   {2, 3, 3, 3}});
  for (NormScheme s : {NormScheme::kBatch, NormScheme::kInstance, NormScheme::kLayer}) {
    cases.push_back({"norm2d_" + std::string(to_string(s)), [s](Rng& r) {
                       return with_params(std::make_unique<Norm2d>(s, 3), r, 0.3);
                     }, {2, 3, 4, 4}, Mode::kTrain, false, false, 0.5});
  }
  cases.push_back({"norm2d_batch_eval", [](Rng& r) {
                     return with_params(std::make_unique<Norm2d>(NormScheme::kBatch, 3), r, 0.3);
                   }, {2, 3, 4, 4}, Mode::kEval, false, true, 0.5});
  cases.push_back({"pcnorm", [](Rng& r) { return with_params(std::make_unique<PCNorm>(3), r, 0.3); },
                   {2, 3, 4, 4}, Mode::kTrain, true, false, 0.4});
  cases.push_back({"pcnorm_nonpow2", [](Rng& r) {
                     return with_params(std::make_unique<PCNorm>(2), r, 0.3);
                   }, {2, 2, 5, 3}, Mode::kTrain, true, false, 0.4});
  cases.push_back({"pcnorm_eval", [](Rng& r) {
                     return with_params(std::make_unique<PCNorm>(3), r, 0.3);
                   }, {2, 3, 4, 4}, Mode::kEval, true, true, 0.4});
  // The content temperature default (1e-6) saturates the pair for any
  // perturbation a finite difference can resolve; 0.5 keeps it smooth.
  // lambda only moves the DC bin of the phase source, whose phase is 0 or pi,
  // so its gradient is flat away from sign changes of a slice mean.
  cases.push_back({"ccnorm", [](Rng& r) {
                     auto c = std::make_unique<CCNorm>(3, 0.5);
                     for (double& v : c->adjust().raw().data()) v = 0.2 * r.normal();
                     return with_params(std::move(c), r, 0.3);
                   }, {2, 3, 4, 4}, Mode::kTrain, true, false, 0.6, {"lambda"}});
  cases.push_back({"ccnorm_eval", [](Rng& r) {
                     auto c = std::make_unique<CCNorm>(3, 0.5);
                     for (double& v : c->adjust().raw().data()) v = 0.2 * r.normal();
                     return with_params(std::move(c), r, 0.3);
                   }, {2, 3, 4, 4}, Mode::kEval, true, true, 0.6, {"lambda"}});
  for (NormScheme s : {NormScheme::kInstance, NormScheme::kLayer, NormScheme::kBatch}) {
    cases.push_back({"scnorm_" + std::string(to_string(s)), [s](Rng& r) {
                       auto c = std::make_unique<SCNorm>(3, s);
                       for (double& v : c->adjust().raw().data()) v = 0.05 * r.normal();
                       return std::unique_ptr<Layer>(std::move(c));
                     }, {2, 3, 4, 4}, Mode::kTrain, true, false, 0.3});
  }
  cases.push_back({"scnorm_affine", [](Rng& r) {
                     auto c = std::make_unique<SCNorm>(2, NormScheme::kInstance, kStyleTemperature, true);
                     for (double& v : c->adjust().raw().data()) v = 0.05 * r.normal();
                     return with_params(std::move(c), r, 0.3);
                   }, {1, 2, 4, 4}, Mode::kTrain, true, false, 0.3});

  for (const LayerCase& lc : cases) check_layer(rep, lc, instances, rng);
  check_spectral_primitives(rep, instances, rng);
  check_spectral_mix(rep, instances, rng);
  check_cross_entropy(rep, instances, rng);
  for (Variant v : {Variant::kBaseline, Variant::kDacP, Variant::kDacSc}) {
    check_model(rep, v, instances, rng);
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------- endpoints

namespace {

// Rescales each channel so batch statistics give mean 0 and std exactly 1
// after the epsilon floor (biased variance 1 - eps).
Tensor standardized(const Tensor& x) {
  const NormStats st = compute_stats(x, NormScheme::kBatch, Mode::kTrain);
  Tensor out = x;
  const Shape& s = x.shape();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const double k = std::sqrt((1.0 - kNormEpsilon) / st.var[c]);
      for (double& v : out.plane(n, c)) v = (v - st.mean[c]) * k;
    }
  }
  return out;
}

double amplitude_gap(const Tensor& a, const Tensor& b) {
  double e = 0.0;
  const Shape& s = a.shape();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const SpectralPair pa = decompose(dft2(slice(a, n, c)));
      const SpectralPair pb = decompose(dft2(slice(b, n, c)));
      for (std::size_t k = 0; k < pa.amplitude.size(); ++k) {
        e = std::max(e, std::abs(pa.amplitude[k] - pb.amplitude[k]));
      }
    }
  }
  return e;
}

}  // namespace

SuiteReport run_endpoint_suite(std::uint64_t seed, std::size_t instances) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.name = "endpoint";
  rep.checks.reserve(6);
  CheckResult& pc_id = check(rep, "pcnorm_standardized_identity", 1e-6);
  CheckResult& cc0 = check(rep, "ccnorm_lambda0_is_pcnorm", 1e-9);
  CheckResult& cc1 = check(rep, "ccnorm_lambda1_is_batchnorm", 1e-9);
  CheckResult& sc0 = check(rep, "scnorm_lambda0_identity", 1e-10);
  CheckResult& sc1 = check(rep, "scnorm_lambda1_instance_amp", 1e-9);
  CheckResult& sc_half = check(rep, "scnorm_half_midpoint_amp", 1e-9);
  Rng rng(derive_seed(seed, 0x656e6470ULL));
  const Shape shape{2, 3, 8, 8};
  for (std::size_t i = 0; i < instances; ++i) {
    const Tensor f = random_normal(shape, rng, rng.uniform(0.5, 3.0), rng.uniform(-2.0, 2.0));

    PCNorm pc(3);
    const Tensor z = standardized(f);
    pc_id.record(max_abs_diff(pc.forward(z, Mode::kTrain), z));

    PCNorm pc2(3);
    const Tensor pcf = pc2.forward(f, Mode::kTrain);
    CCNorm c0(3);
    c0.adjust().freeze(1.0);  // lambda_norm = 0
    cc0.record(max_abs_diff(c0.forward(f, Mode::kTrain), pcf));
    CCNorm c1(3);
    c1.adjust().freeze(0.0);  // lambda_norm = 1
    const NormStats bs = compute_stats(f, NormScheme::kBatch, Mode::kTrain);
    cc1.record(max_abs_diff(c1.forward(f, Mode::kTrain), normalize(f, bs)));

    SCNorm s0(3);
    s0.adjust().freeze(1.0);
    sc0.record(max_abs_diff(s0.forward(f, Mode::kTrain), f));
    SCNorm s1(3);
    s1.adjust().freeze(0.0);
    const Tensor in_norm =
        normalize(f, compute_stats(f, NormScheme::kInstance, Mode::kTrain));
    sc1.record(amplitude_gap(s1.forward(f, Mode::kTrain), in_norm));

    SCNorm sh(3);
    sh.adjust().freeze(0.5);
    const Tensor half = sh.forward(f, Mode::kTrain);
    double e = 0.0;
    for (std::size_t n = 0; n < shape.n; ++n) {
      for (std::size_t c = 0; c < shape.c; ++c) {
        const SpectralPair ph = decompose(dft2(slice(half, n, c)));
        const SpectralPair pf = decompose(dft2(slice(f, n, c)));
        const SpectralPair pn = decompose(dft2(slice(in_norm, n, c)));
        for (std::size_t k = 0; k < ph.amplitude.size(); ++k) {
          e = std::max(e, std::abs(ph.amplitude[k] -
                                   0.5 * (pf.amplitude[k] + pn.amplitude[k])));
        }
      }
    }
    sc_half.record(e);
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

}  // namespace freqnorm
