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

// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any FAIL.
//   freqnorm_acceptance [--criteria 1,2,3]

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqnorm/dataset.h"
#include "freqnorm/experiment.h"
#include "freqnorm/freq_norms.h"
#include "freqnorm/image_io.h"
#include "freqnorm/model.h"
#include "freqnorm/normstats.h"
#include "freqnorm/spectral.h"
#include "freqnorm/styletransfer.h"
#include "freqnorm/verification.h"
#include "oracles.h"

namespace fs = std::filesystem;
using namespace freqnorm;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failures for one criterion; the first few are echoed.
struct Verdict {
  int id;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void le(double got, double bound, const std::string& what) {
    if (!(got <= bound)) {
      std::ostringstream s;
      s << what << ": " << got << " > " << bound;
      failures.push_back(s.str());
    }
  }
  bool passed() const { return failures.empty(); }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double max_gap(const std::vector<oracle::cplx>& a, const std::vector<oracle::cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<oracle::cplx> to_cplx(const ComplexGrid& g) {
  std::vector<oracle::cplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = {g.re[i], g.im[i]};
  return out;
}

Grid random_grid(std::size_t h, std::size_t w, std::mt19937_64& gen, double scale = 1.0,
                 double offset = 0.0) {
  std::normal_distribution<double> d(offset, scale);
  Grid g = Grid::zeros(h, w);
  for (double& x : g.v) x = d(gen);
  return g;
}

// ---------------------------------------------------------------- 1

void criterion1(Verdict& v) {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> mu_d(-3.0, 3.0), sigma_d(0.1001, 4.0);
  std::size_t tensors = 0;
  double worst_a = 0.0, worst_b = 0.0, worst_c = 0.0, worst_ref = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  for (std::size_t s = 3; s <= 16; ++s) sizes.push_back({s, s});
  for (auto hw : {std::pair<std::size_t, std::size_t>{3, 16}, {16, 5}, {7, 12}, {10, 4}}) {
    sizes.push_back(hw);
  }
  for (auto [h, w] : sizes) {
    for (int trial = 0; trial < 6; ++trial, ++tensors) {
      const Grid f = random_grid(h, w, gen, 2.0, 0.5);
      const double mu = mu_d(gen), sigma = sigma_d(gen);
      Grid shifted = f, scaled = f, centered = f;
      for (std::size_t i = 0; i < f.v.size(); ++i) {
        shifted.v[i] = (f.v[i] - mu) / sigma;
        scaled.v[i] = f.v[i] / sigma;
        centered.v[i] = f.v[i] - mu;
      }
      const ComplexGrid F = dft2(f);
      worst_ref = std::max(worst_ref, max_gap(to_cplx(F), oracle::dft(f.v, h, w)));

      // (a) FT((f - mu)/sigma) == (FT(f) - FT(mu * 1)) / sigma
      const ComplexGrid lhs = dft2(shifted);
      const ComplexGrid mu_ft = dft2(Grid{h, w, std::vector<double>(h * w, mu)});
      for (std::size_t i = 0; i < F.size(); ++i) {
        const oracle::cplx rhs{(F.re[i] - mu_ft.re[i]) / sigma, (F.im[i] - mu_ft.im[i]) / sigma};
        worst_a = std::max(worst_a, std::abs(oracle::cplx{lhs.re[i], lhs.im[i]} - rhs));
      }
      // (b) phase(FT(f / sigma)) == phase(FT(f)) where the amplitude is > 1e-9
      const SpectralPair pf = decompose(F), ps = decompose(dft2(scaled));
      for (std::size_t i = 0; i < F.size(); ++i) {
        if (pf.amplitude[i] <= 1e-9) continue;
        worst_b = std::max(worst_b, std::abs(wrap_angle(ps.phase[i] - pf.phase[i])));
      }
      // (c) subtracting a constant touches only the DC bin
      const ComplexGrid C = dft2(centered);
      for (std::size_t i = 1; i < F.size(); ++i) {
        worst_c = std::max(worst_c, std::hypot(C.re[i] - F.re[i], C.im[i] - F.im[i]));
      }
    }
  }
  DerivationOptions opt;
  const SuiteReport rep = run_derivation_suite(opt);
  const double secs = seconds_since(t0);
  v.expect(tensors >= 100, "fewer than 100 tensors");
  v.le(worst_ref, 1e-12, "dft2 vs direct sum");
  v.le(worst_a, 1e-9, "(a) normalized spectrum");
  v.le(worst_b, 1e-10, "(b) phase under scaling");
  v.le(worst_c, 1e-12, "(c) mean shift off-DC");
  v.expect(rep.passed(), "library derivation suite failed:\n" + rep.format());
  v.le(secs, 10.0, "runtime seconds");
  v.notes.push_back("tensors=" + std::to_string(tensors) + " a=" + fmt(worst_a) +
                    " b=" + fmt(worst_b) + " c=" + fmt(worst_c) + " seconds=" + fmt(secs));
}

// ---------------------------------------------------------------- 2

void criterion2(Verdict& v) {
  std::mt19937_64 gen(202);
  std::uniform_int_distribution<std::size_t> side(1, 16);
  double worst_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t h = side(gen), w = side(gen);
    const Grid f = random_grid(h, w, gen, 1.5, 0.3);
    const Grid back = idft2(compose(decompose(dft2(f))));
    for (std::size_t k = 0; k < f.v.size(); ++k) {
      worst_rt = std::max(worst_rt, std::abs(back.v[k] - f.v[k]));
    }
  }
  double worst_fast = 0.0;
  std::size_t bins = 0;
  for (std::size_t h : {2, 4, 8, 16, 32})
    for (std::size_t w : {2, 4, 8, 16, 32}) {
      for (int t = 0; t < 3; ++t) {
        const Grid f = random_grid(h, w, gen);
        const ComplexGrid fast = fft2_fast(f);
        const auto ref = oracle::dft(f.v, h, w);
        for (std::size_t k = 0; k < ref.size(); ++k) {
          const double a = std::abs(ref[k]);
          if (a < 1e-6) continue;
          ++bins;
          worst_fast = std::max(worst_fast, std::abs(std::hypot(fast.re[k], fast.im[k]) - a) / a);
        }
      }
    }
  const SuiteReport rep = run_fft_suite(202);
  v.le(worst_rt, 1e-10, "round trip over 1000 slices");
  v.le(worst_fast, 1e-9, "fast vs naive amplitude, relative");
  v.expect(rep.passed(), "library fft suite failed:\n" + rep.format());
  v.notes.push_back("roundtrip=" + fmt(worst_rt) + " fast_vs_naive=" + fmt(worst_fast) +
                    " bins=" + std::to_string(bins));
}

// ---------------------------------------------------------------- 3

// Per channel: mean 0 and biased variance 1 - 1e-5, so sqrt(var + eps) == 1
// and batch normalization leaves the tensor unchanged.
Tensor standardized(std::mt19937_64& gen) {
  Tensor t = oracle::random_tensor({2, 3, 8, 8}, gen, 1.7, 0.4);
  const std::size_t per = 2 * 64;
  for (std::size_t c = 0; c < 3; ++c) {
    long double m = 0.0L;
    for (std::size_t n = 0; n < 2; ++n)
      for (double x : t.plane(n, c)) m += x;
    m /= per;
    long double var = 0.0L;
    for (std::size_t n = 0; n < 2; ++n)
      for (double x : t.plane(n, c)) var += (x - m) * (x - m);
    var /= per;
    const long double k = std::sqrt((1.0L - 1e-5L) / var);
    for (std::size_t n = 0; n < 2; ++n)
      for (double& x : t.plane(n, c)) x = static_cast<double>((x - m) * k);
  }
  return t;
}

void criterion3(Verdict& v) {
  std::mt19937_64 gen(303);
  double pc = 0.0, cc0 = 0.0, cc1 = 0.0, sc0 = 0.0, sc1 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Tensor s = standardized(gen);
    pc = std::max(pc, max_abs_diff(pcnorm_forward(s, compute_stats(s, NormScheme::kBatch,
                                                                    Mode::kTrain)),
                                   s));

    const Tensor f = oracle::random_tensor({2, 3, 8, 8}, gen, 2.0, 0.7);
    const NormStats bn = compute_stats(f, NormScheme::kBatch, Mode::kTrain);
    cc0 = std::max(cc0, max_abs_diff(ccnorm_forward(f, bn, 0.0), pcnorm_forward(f, bn)));
    cc1 = std::max(cc1, max_abs_diff(ccnorm_forward(f, bn, 1.0),
                                     oracle::normalize(f, oracle::Groups::kBatch)));

    const NormStats in = compute_stats(f, NormScheme::kInstance, Mode::kTrain);
    sc0 = std::max(sc0, max_abs_diff(scnorm_forward(f, in, 0.0, 1.0), f));
    const Tensor out = scnorm_forward(f, in, 1.0, 0.0);
    const Tensor ref = oracle::normalize(f, oracle::Groups::kInstance);
    for (std::size_t n = 0; n < 2; ++n)
      for (std::size_t c = 0; c < 3; ++c) {
        const auto a = oracle::amplitudes(oracle::dft_plane(out, n, c));
        const auto b = oracle::amplitudes(oracle::dft_plane(ref, n, c));
        for (std::size_t k = 0; k < a.size(); ++k) sc1 = std::max(sc1, std::abs(a[k] - b[k]));
      }
  }
  const SuiteReport rep = run_endpoint_suite(303);
  v.le(pc, 1e-6, "PCNorm on standardized input");
  v.le(cc0, 1e-9, "CCNorm(0) vs PCNorm");
  v.le(cc1, 1e-9, "CCNorm(1) vs batch norm");
  v.le(sc0, 1e-10, "SCNorm(0) vs identity");
  v.le(sc1, 1e-9, "SCNorm(1) amplitude vs instance norm");
  v.expect(rep.passed(), "library endpoint suite failed:\n" + rep.format());
  v.notes.push_back("pcnorm=" + fmt(pc) + " cc0=" + fmt(cc0) + " cc1=" + fmt(cc1) +
                    " sc0=" + fmt(sc0) + " sc1=" + fmt(sc1));
}

// ---------------------------------------------------------------- 4

void criterion4(Verdict& v) {
  const auto t0 = Clock::now();
  const SuiteReport rep = run_gradient_suite(404, 10);
  const double secs = seconds_since(t0);
  double worst = 0.0, worst_flat = 0.0;
  std::size_t checks = 0;
  for (const CheckResult& c : rep.checks) {
    v.expect(c.samples >= 10, c.name + " has fewer than 10 instances");
    if (c.name.ends_with(".flat")) {
      // Identically zero gradient: analytic and numeric must both sit inside
      // the finite-difference roundoff bound.
      worst_flat = std::max(worst_flat, c.max_error);
      v.le(c.max_error, 1.0, c.name + " (fraction of roundoff bound)");
      continue;
    }
    ++checks;
    worst = std::max(worst, c.max_error);
    v.le(c.max_error, 1e-5, c.name);
  }
  v.expect(checks > 0, "no gradient checks ran");
  v.le(secs, 300.0, "runtime seconds");
  v.notes.push_back("checks=" + std::to_string(checks) + " worst=" + fmt(worst) +
                    " flat=" + fmt(worst_flat) + " seconds=" + fmt(secs));
}

// ---------------------------------------------------------------- 5

// Pinned toy-benchmark protocol.
constexpr std::size_t kAc5Epochs = 10;
constexpr std::size_t kAc5Iters = 60;
constexpr double kAc5Lr = 0.05;
const std::vector<StageSpec> kAc5Stages = {{1, 8}, {1, 16}, {1, 32}, {1, 64}};

void criterion5(Verdict& v) {
  const auto t0 = Clock::now();
  const DomainDataset ds = generate(GeneratorConfig::defaults());
  std::map<Variant, std::vector<ResultRecord>> recs;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (const std::string& held : ds.domain_names()) {
      for (Variant var : {Variant::kBaseline, Variant::kDacP, Variant::kDacSc}) {
        ModelSpec spec;
        spec.variant = var;
        spec.stages = kAc5Stages;
        spec.in_height = spec.in_width = ds.config.size;
        spec.classes = ds.config.classes;
        Protocol p;
        p.held_out = held;
        p.seed = seed;
        p.epochs = kAc5Epochs;
        p.iterations_per_epoch = kAc5Iters;
        p.sgd.lr = kAc5Lr;
        const ResultRecord r = run_experiment(ds, spec, p);
        std::cout << "  " << r.run_id << " test_acc=" << r.test_acc << "\n" << std::flush;
        recs[var].push_back(r);
      }
    }
  }
  const double secs = seconds_since(t0);
  const double base = mean_test_accuracy(recs[Variant::kBaseline]);
  const double dp = mean_test_accuracy(recs[Variant::kDacP]) - base;
  const double dsc = mean_test_accuracy(recs[Variant::kDacSc]) - base;
  v.expect(dsc >= -0.01, "dac_sc below baseline - 1 point (delta " + fmt(dsc) + ")");
  v.expect(dp >= -0.01, "dac_p below baseline - 1 point (delta " + fmt(dp) + ")");
  v.expect(std::max(dsc, dp) >= 0.02, "neither variant beats baseline by 2 points");
  v.le(secs, 1800.0, "runtime seconds");
  v.notes.push_back("baseline=" + fmt(base) + " delta_dac_p=" + fmt(dp) +
                    " delta_dac_sc=" + fmt(dsc) + " seconds=" + fmt(secs));
}

// ---------------------------------------------------------------- 6

GeneratorConfig small_config() {
  GeneratorConfig cfg = GeneratorConfig::defaults();
  cfg.classes = 4;
  cfg.images_per_class = 50;
  cfg.size = 16;
  return cfg;
}

ModelSpec small_spec(const GeneratorConfig& cfg, Variant var) {
  ModelSpec spec;
  spec.variant = var;
  spec.stages = {{1, 8}, {1, 8}, {1, 16}, {1, 16}};
  spec.stem_channels = 4;
  spec.in_height = spec.in_width = cfg.size;
  spec.classes = cfg.classes;
  return spec;
}

void criterion6(Verdict& v) {
  const GeneratorConfig cfg = small_config();
  const DomainDataset ds = generate(cfg);
  {
    Model fresh(small_spec(cfg, Variant::kDacSc), 1);
    const auto rows = report_lambdas(fresh);
    v.expect(rows.size() == 7, "expected 7 adjust pairs");
    for (const LambdaRow& r : rows) {
      v.expect(r.lambda_norm == 0.5 && r.lambda_org == 0.5, r.module + " untrained pair not 0.5");
    }
  }
  Protocol p;
  p.held_out = "sketch";
  p.seed = 2;
  p.epochs = 3;
  p.iterations_per_epoch = 10;
  p.batch_size = 16;
  p.sgd.lr = 0.05;
  std::unique_ptr<Model> model;
  const ResultRecord rec = run_experiment(ds, small_spec(cfg, Variant::kDacSc), p, {}, &model);
  for (const LambdaRow& r : rec.lambdas) {
    v.le(std::abs(r.lambda_norm + r.lambda_org - 1.0), 1e-12, r.module + " pair sum");
    v.expect(r.lambda_norm > 0.0 && r.lambda_norm < 1.0, r.module + " lambda_norm outside (0,1)");
    v.expect(r.lambda_org > 0.0 && r.lambda_org < 1.0, r.module + " lambda_org outside (0,1)");
    if (r.module.starts_with("scnorm")) {
      v.notes.push_back(r.module + ".lambda_org=" + std::to_string(r.lambda_org) +
                        " (reference 0.9898)");
    }
  }

  std::mt19937_64 gen(606);
  SCNorm* sc = model->scnorm(3);
  v.expect(sc != nullptr, "no scnorm3");
  if (!sc) return;
  const std::size_t ch = small_spec(cfg, Variant::kDacSc).stages[2].channels;
  const Tensor probe = oracle::random_tensor({4, ch, 2, 2}, gen, 1.3, 0.2);
  model->adjust("scnorm3").params->freeze(1.0);
  const Tensor out = sc->forward(probe, Mode::kEval);
  v.expect(out == probe, "frozen scnorm3 is not bit-identical to identity");
  const Tensor out_train = sc->forward(probe, Mode::kTrain);
  v.expect(out_train == probe, "frozen scnorm3 (train mode) is not bit-identical to identity");
  model->adjust("scnorm3").params->unfreeze();
  const DomainData& held = ds.domain("sketch");
  const AblationResult ab =
      fixed_lambda_ablation(*model, "scnorm3", 1.0, held.images, held.labels);
  v.expect(ab.frozen && ab.lambda_org == 1.0, "ablation did not freeze scnorm3 at 1");
  v.notes.push_back("ablation scnorm3=1 test_acc=" + std::to_string(ab.test_acc) +
                    " trained=" + std::to_string(rec.test_acc));
}

// ---------------------------------------------------------------- 7

void criterion7(Verdict& v) {
  GeneratorConfig cfg = GeneratorConfig::defaults();
  double amp = 0.0;
  std::size_t pairs = 0;
  for (std::size_t k = 0; k < 4; ++k, ++pairs) {
    const Tensor c = apply_style(render_content(cfg, k, 2 * k), cfg.domains[k % 4], 11 + k);
    const Tensor s =
        apply_style(render_content(cfg, (k + 1) % 5, 3 * k + 1), cfg.domains[(k + 2) % 4], 21 + k);
    const TransferResult r = amplitude_swap(c, s);
    for (std::size_t ch = 0; ch < 3; ++ch) {
      const auto a = oracle::amplitudes(oracle::dft_plane(r.raw, 0, ch));
      const auto b = oracle::amplitudes(oracle::dft_plane(s, 0, ch));
      for (std::size_t i = 0; i < a.size(); ++i) amp = std::max(amp, std::abs(a[i] - b[i]));
    }
    const TransferResult m0 = amplitude_mix(c, s, 0.0);
    const TransferResult m1 = amplitude_mix(c, s, 1.0);
    v.expect(m0.raw == c, "mix(0) differs from content");
    v.expect(m1.raw == r.raw && m1.image == r.image, "mix(1) differs from swap");
  }
  std::mt19937_64 gen(707);
  std::uniform_int_distribution<int> byte(0, 255);
  std::size_t identical = 0;
  const std::size_t trials = 6;
  for (std::size_t t = 0; t < trials; ++t) {
    Image8 img;
    img.width = 8 + 5 * t;
    img.height = 32 - 3 * t;
    img.rgb.resize(img.width * img.height * 3);
    for (auto& b : img.rgb) b = static_cast<std::uint8_t>(byte(gen));
    const Tensor x = image_to_tensor(img);
    identical += tensor_to_image(amplitude_swap(x, x).image).rgb == img.rgb;
  }
  v.le(amp, 1e-9, "swap amplitude vs style");
  v.expect(identical == trials, "self-swap changed pixels after 8-bit rounding");
  v.notes.push_back("pairs=" + std::to_string(pairs) + " amplitude=" + fmt(amp) +
                    " self_swap_identical=" + std::to_string(identical) + "/" +
                    std::to_string(trials));
}

// ---------------------------------------------------------------- 8

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion8(Verdict& v) {
  const fs::path dir =
      fs::temp_directory_path() / ("freqnorm_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  save_dataset(generate(small_config()), dir / "data");
  std::ofstream(dir / "small.cfg") << "model.stages=1x8,1x8,1x16,1x16\nmodel.stem_channels=4\n";
  for (const char* variant : {"baseline", "dac_sc"}) {
    const auto args = [&](const std::string& out) {
      return std::string(FREQNORM_CLI_PATH) + " train --config " + (dir / "small.cfg").string() +
             " --variant " + variant + " --data " + (dir / "data").string() +
             " --holdout cartoon --seed 9 --epochs 3 --iters 4 --batch 16 --lr 0.05 --out " +
             (dir / out).string();
    };
    const std::string a = std::string(variant) + "_a", b = std::string(variant) + "_b";
    v.expect(shell(args(a)) == 0, std::string(variant) + " first run failed");
    v.expect(shell(args(b)) == 0, std::string(variant) + " second run failed");
    std::set<std::string> names_a, names_b;
    if (fs::exists(dir / a))
      for (const auto& e : fs::directory_iterator(dir / a)) names_a.insert(e.path().filename());
    if (fs::exists(dir / b))
      for (const auto& e : fs::directory_iterator(dir / b)) names_b.insert(e.path().filename());
    v.expect(!names_a.empty() && names_a == names_b, std::string(variant) + " file sets differ");
    v.expect(names_a.count("results.csv") && names_a.count("lambdas.csv"),
             std::string(variant) + " CSVs missing");
    for (const std::string& n : names_a) {
      v.expect(slurp(dir / a / n) == slurp(dir / b / n), std::string(variant) + "/" + n +
                                                             " differs between runs");
    }
    v.notes.push_back(std::string(variant) + " files=" + std::to_string(names_a.size()));
  }
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freqnorm acceptance criteria"};
  std::vector<int> criteria = {1, 2, 3, 4, 5, 6, 7, 8};
  app.add_option("--criteria", criteria, "Criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::pair<const char*, void (*)(Verdict&)>> table = {
      {1, {"derivation suite", criterion1}},   {2, {"spectral round trip", criterion2}},
      {3, {"operator endpoints", criterion3}}, {4, {"gradient checks", criterion4}},
      {5, {"toy DG benchmark", criterion5}},   {6, {"lambda reporting", criterion6}},
      {7, {"style transfer", criterion7}},     {8, {"determinism", criterion8}},
  };
  bool all = true;
  for (int id : criteria) {
    auto it = table.find(id);
    if (it == table.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Verdict v{id, {}, {}};
    const auto t0 = Clock::now();
    try {
      it->second.second(v);
    } catch (const std::exception& e) {
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << id << " " << it->second.first << ": "
              << (v.passed() ? "PASS" : "FAIL") << " (" << fmt(seconds_since(t0)) << " s)\n";
    for (const auto& n : v.notes) std::cout << "  " << n << "\n";
    for (std::size_t k = 0; k < v.failures.size() && k < 10; ++k) {
      std::cout << "  fail: " << v.failures[k] << "\n";
    }
    std::cout << std::flush;
    all = all && v.passed();
  }
  return all ? 0 : 1;
}
