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

// freqnorm: verification suites, dataset generation, training, evaluation,
// lambda reporting and image-level spectral style transfer.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqnorm/checkpoint.h"
#include "freqnorm/dataset.h"
#include "freqnorm/errors.h"
#include "freqnorm/experiment.h"
#include "freqnorm/image_io.h"
#include "freqnorm/keyvalue.h"
#include "freqnorm/model.h"
#include "freqnorm/styletransfer.h"
#include "freqnorm/tensor_io.h"
#include "freqnorm/verification.h"

namespace fs = std::filesystem;
using namespace freqnorm;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kVerification = 3,
  kIo = 4,
  kAborted = 5,
};

void error_line(std::string_view kind, std::string_view message) {
  std::string flat(message);
  for (char& c : flat) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "error: kind=" << kind << " message=" << flat << "\n";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kIo;
    case ErrorKind::kAbortedRun:
      return kAborted;
    case ErrorKind::kVerification:
      return kVerification;
    default:
      return kUsage;
  }
}

// Applies `key=value` entries from a config file to options the user did
// not pass on the command line. Keys are the long flag names without dashes;
// keys with a "model." prefix are collected separately.
class ConfigOverlay {
 public:
  void bind(const std::string& key, std::function<void(const std::string&)> apply) {
    setters_[key] = std::move(apply);
  }

  void apply(const CLI::App& cmd, const std::string& path, KeyValueFile* model_keys) {
    if (path.empty()) return;
    const KeyValueFile kv = KeyValueFile::load(path);
    for (const auto& [key, value] : kv.entries()) {
      if (key.rfind("model.", 0) == 0 && model_keys) {
        model_keys->set(key, value);
        continue;
      }
      auto it = setters_.find(key);
      if (it == setters_.end()) {
        throw ConfigError(path + ": unknown key '" + key + "'");
      }
      if (cmd.count("--" + key) == 0) it->second(value);
    }
  }

 private:
  std::map<std::string, std::function<void(const std::string&)>> setters_;
};

std::string meta(const KeyValueFile& manifest, const std::string& key) {
  return manifest.get("meta." + key).value_or("");
}

void emit(const std::string& text, const std::string& out) {
  std::cout << text;
  if (!out.empty()) write_file_atomic(out, text);
}

// ----------------------------------------------------------------- verify

struct VerifyArgs {
  std::string sizes = "3-16";
  std::size_t trials = 8;
  std::uint64_t seed = 0;
  bool inject_bug = false;
};

int run_verify(const VerifyArgs& a) {
  DerivationOptions opt;
  opt.sizes = parse_sizes(a.sizes);
  opt.trials = a.trials;
  opt.seed = a.seed;
  opt.inject_bug = a.inject_bug;
  const SuiteReport rep = run_derivation_suite(opt);
  std::cout << rep.format();
  std::cout << "verify " << (rep.passed() ? "PASS" : "FAIL") << " seconds="
            << format_double(rep.seconds) << "\n";
  if (!rep.passed()) {
    error_line("verification", "derivation suite exceeded tolerance");
    return kVerification;
  }
  return kOk;
}

// --------------------------------------------------------------- selftest

int run_selftest(std::uint64_t seed) {
  const std::vector<SuiteReport> reports = {
      run_fft_suite(seed),
      run_gradient_suite(seed),
      run_endpoint_suite(seed),
  };
  bool ok = true;
  for (const SuiteReport& r : reports) std::cout << r.format();
  std::cout << "\nsuite      checks  seconds  result\n";
  for (const SuiteReport& r : reports) {
    char line[128];
    std::snprintf(line, sizeof line, "%-10s %6zu %8.2f  %s\n", r.name.c_str(), r.checks.size(),
                  r.seconds, r.passed() ? "PASS" : "FAIL");
    std::cout << line;
    ok = ok && r.passed();
  }
  if (!ok) {
    error_line("verification", "selftest failed");
    return kVerification;
  }
  return kOk;
}

// --------------------------------------------------------------- gen-data

struct GenArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t images_per_class = 0;
  std::size_t classes = 0;
  std::size_t size = 0;
};

int run_gen_data(const CLI::App& cmd, const GenArgs& a) {
  GeneratorConfig cfg = GeneratorConfig::defaults();
  if (!a.config.empty()) cfg = GeneratorConfig::from_keyvalue(KeyValueFile::load(a.config));
  if (cmd.count("--seed")) cfg.seed = a.seed;
  if (cmd.count("--images-per-class")) cfg.images_per_class = a.images_per_class;
  if (cmd.count("--classes")) cfg.classes = a.classes;
  if (cmd.count("--size")) cfg.size = a.size;
  cfg.validate();
  const DomainDataset ds = generate(cfg);
  save_dataset(ds, a.out);
  for (const DomainData& d : ds.domains) {
    std::cout << "domain " << d.name << " images=" << d.labels.size() << "\n";
  }
  std::cout << "wrote " << a.out << "\n";
  return kOk;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string config;
  std::string variant = "baseline";
  std::string data;
  std::string holdout;
  std::uint64_t seed = 0;
  double lr = SgdConfig{}.lr;
  std::size_t epochs = Protocol{}.epochs;
  std::size_t iters = 0;
  std::size_t batch = Protocol{}.batch_size;
  double momentum_stats = kDefaultStatsMomentum;
  double val_fraction = Protocol{}.val_fraction;
  double min_lr = 0.0;
  std::size_t tolerance = Protocol{}.early_stop_tolerance;
  bool stop_grad_stats = false;
  std::string out;
};

int run_train(const TrainArgs& a, const KeyValueFile& model_keys) {
  if (a.data.empty()) throw ConfigError("train: --data is required");
  if (a.holdout.empty()) throw ConfigError("train: --holdout is required");
  if (a.out.empty()) throw ConfigError("train: --out is required");

  const DomainDataset ds = load_dataset(a.data);
  ModelSpec spec;
  {
    KeyValueFile kv;
    spec.store(kv);
    for (const auto& [k, v] : model_keys.entries()) kv.set(k, v);
    spec = ModelSpec::load(kv);
  }
  spec.variant = parse_variant(a.variant);
  spec.stats_momentum = a.momentum_stats;
  spec.stop_grad_stats = spec.stop_grad_stats || a.stop_grad_stats;
  spec.in_height = spec.in_width = ds.config.size;
  spec.classes = ds.config.classes;
  spec.validate();

  Protocol p;
  p.held_out = a.holdout;
  p.seed = a.seed;
  p.sgd.lr = a.lr;
  p.epochs = a.epochs;
  p.iterations_per_epoch = a.iters;
  p.batch_size = a.batch;
  p.val_fraction = a.val_fraction;
  p.min_lr = a.min_lr;
  p.early_stop_tolerance = a.tolerance;

  std::unique_ptr<Model> model;
  const ResultRecord rec = run_experiment(
      ds, spec, p,
      [](const EpochRecord& e) {
        std::cout << "epoch " << e.epoch << " lr=" << format_double(e.lr)
                  << " train_loss=" << format_double(e.train_loss)
                  << " val_acc=" << format_double(e.val_acc) << "\n";
      },
      &model);

  const fs::path out(a.out);
  save_checkpoint(*model, out,
                  {{"run_id", rec.run_id},
                   {"held_out", rec.held_out},
                   {"seed", std::to_string(rec.seed)},
                   {"best_epoch", std::to_string(rec.best_epoch)},
                   {"val_acc", format_double(rec.val_acc)},
                   {"test_acc", format_double(rec.test_acc)}});
  write_file_atomic(out / "results.csv", results_csv({rec}));
  write_file_atomic(out / "lambdas.csv", lambdas_csv(rec.lambdas));
  std::cout << "run " << rec.run_id << " best_epoch=" << rec.best_epoch
            << " val_acc=" << format_double(rec.val_acc)
            << " test_acc=" << format_double(rec.test_acc) << "\n";
  return kOk;
}

// ------------------------------------------------------------------- eval

int run_eval(const std::string& checkpoint, const std::string& data, std::string holdout,
             const std::string& out) {
  LoadedCheckpoint ck = load_checkpoint(checkpoint);
  if (holdout.empty()) holdout = meta(ck.manifest, "held_out");
  if (holdout.empty()) throw ConfigError("eval: --holdout is required");
  const DomainData dom = load_domain(data, holdout);
  const double acc = evaluate(*ck.model, dom.images, dom.labels);
  std::string run_id = meta(ck.manifest, "run_id");
  if (run_id.empty()) run_id = fs::path(checkpoint).filename().string();
  emit("run_id,variant,held_out,test_acc\n" + run_id + "," +
           std::string(to_string(ck.model->spec().variant)) + "," + holdout + "," +
           format_double(acc) + "\n",
       out);
  return kOk;
}

// ---------------------------------------------------------------- lambdas

int run_lambdas(const std::string& checkpoint, const std::string& out) {
  LoadedCheckpoint ck = load_checkpoint(checkpoint);
  emit(lambdas_csv(report_lambdas(*ck.model)), out);
  return kOk;
}

// ---------------------------------------------------------- ablate-lambda

struct AblateArgs {
  std::string checkpoint;
  std::string module;
  double value = 1.0;
  std::string data;
  std::string holdout;
  std::string out;
};

int run_ablate(const AblateArgs& a) {
  LoadedCheckpoint ck = load_checkpoint(a.checkpoint);
  Model& model = *ck.model;
  std::string line;
  if (!a.data.empty()) {
    std::string holdout = a.holdout.empty() ? meta(ck.manifest, "held_out") : a.holdout;
    if (holdout.empty()) throw ConfigError("ablate-lambda: --holdout is required with --data");
    const DomainData dom = load_domain(a.data, holdout);
    const AblationResult r = fixed_lambda_ablation(model, a.module, a.value, dom.images, dom.labels);
    line = r.module + "," + format_double(r.lambda_org) + "," + (r.frozen ? "1" : "0") + "," +
           format_double(r.test_acc);
  } else {
    AdjustSlot slot = model.adjust(a.module);
    slot.params->freeze(a.value);
    line = slot.module + "," + format_double(slot.params->lambda_org()) + "," +
           (slot.params->frozen() ? "1" : "0") + ",";
  }
  std::cout << "module,lambda_org,frozen,test_acc\n" << line << "\n";
  if (!a.out.empty()) {
    std::vector<std::pair<std::string, std::string>> extra;
    for (const auto& [k, v] : ck.manifest.entries()) {
      if (k.rfind("meta.", 0) == 0) extra.emplace_back(k.substr(5), v);
    }
    save_checkpoint(model, a.out, extra);
    std::cout << "wrote " << a.out << "\n";
  }
  return kOk;
}

// --------------------------------------------------------- style-transfer

struct StyleArgs {
  std::string mode = "swap";
  std::string content;
  std::string style;
  double ratio = 0.5;
  double band = 0.1;
  std::string out;
};

int run_style(const StyleArgs& a) {
  const TransferMode mode = parse_transfer_mode(a.mode);
  const Tensor content = read_image(a.content);
  const Tensor style = read_image(a.style);
  TransferResult r;
  switch (mode) {
    case TransferMode::kSwap:
      r = amplitude_swap(content, style);
      break;
    case TransferMode::kMix:
      r = amplitude_mix(content, style, a.ratio);
      break;
    case TransferMode::kLowFreq:
      r = low_freq_swap(content, style, a.band);
      break;
  }
  write_image(a.out, r.image);
  std::cout << "wrote " << a.out << " clipped_fraction=" << format_double(r.clipped_fraction)
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain normalization toolkit", "freqnorm"};
  app.require_subcommand(1);
  app.footer("Environment: FREQNORM_THREADS sets the worker count (default 1).\n"
             "Exit codes: 0 ok, 2 usage, 3 verification failure, 4 I/O error, 5 aborted run.");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check the mean-shift derivation on random tensors");
  verify->add_option("--sizes", va.sizes, "Grid sizes, e.g. 3-16 or 3x3,5x7")->capture_default_str();
  verify->add_option("--trials", va.trials, "Random tensors per size")->capture_default_str();
  verify->add_option("--seed", va.seed, "Random seed")->capture_default_str();
  verify->add_flag("--inject-bug", va.inject_bug,
                   "Test hook: corrupt the reference model so the suite must fail");

  std::uint64_t selftest_seed = 0;
  auto* selftest = app.add_subcommand("selftest", "FFT, gradient and endpoint suites");
  selftest->add_option("--seed", selftest_seed, "Random seed")->capture_default_str();

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic multi-domain dataset");
  gen->add_option("--config", ga.config, "key=value generator config")->check(CLI::ExistingFile);
  gen->add_option("--out", ga.out, "Output directory")->required();
  gen->add_option("--seed", ga.seed, "Content seed (overrides config)");
  gen->add_option("--images-per-class", ga.images_per_class, "Images per class per domain");
  gen->add_option("--classes", ga.classes, "Number of classes");
  gen->add_option("--size", ga.size, "Image side length");

  TrainArgs ta;
  ConfigOverlay overlay;
  auto* train = app.add_subcommand("train", "Leave-one-domain-out training run");
  train->add_option("--config", ta.config, "key=value file; flags override it")
      ->check(CLI::ExistingFile);
  train->add_option("--variant", ta.variant, "baseline | dac_p | dac_sc")->capture_default_str();
  train->add_option("--data", ta.data, "Dataset directory");
  train->add_option("--holdout", ta.holdout, "Held-out domain name");
  train->add_option("--seed", ta.seed, "Run seed (split, init, batch order)")->capture_default_str();
  train->add_option("--lr", ta.lr, "Base learning rate")->capture_default_str();
  train->add_option("--epochs", ta.epochs, "Maximum epochs")->capture_default_str();
  train->add_option("--iters", ta.iters, "Iterations per epoch (0 = one pass)")->capture_default_str();
  train->add_option("--batch", ta.batch, "Mini-batch size")->capture_default_str();
  train->add_option("--momentum-stats", ta.momentum_stats,
                    "Running-statistics momentum (0 = cumulative average)")
      ->capture_default_str();
  train->add_option("--val-fraction", ta.val_fraction, "Source validation fraction")
      ->capture_default_str();
  train->add_option("--min-lr", ta.min_lr, "Cosine schedule floor")->capture_default_str();
  train->add_option("--tolerance", ta.tolerance, "Early-stopping tolerance")->capture_default_str();
  train->add_flag("--stop-grad-stats", ta.stop_grad_stats,
                  "Treat normalization statistics as constants in backward");
  train->add_option("--out", ta.out, "Output directory (checkpoint and CSVs)");
  overlay.bind("variant", [&](const std::string& v) { ta.variant = v; });
  overlay.bind("data", [&](const std::string& v) { ta.data = v; });
  overlay.bind("holdout", [&](const std::string& v) { ta.holdout = v; });
  overlay.bind("seed", [&](const std::string& v) { ta.seed = parse_u64(v, "seed"); });
  overlay.bind("lr", [&](const std::string& v) { ta.lr = parse_double(v, "lr"); });
  overlay.bind("epochs", [&](const std::string& v) { ta.epochs = parse_u64(v, "epochs"); });
  overlay.bind("iters", [&](const std::string& v) { ta.iters = parse_u64(v, "iters"); });
  overlay.bind("batch", [&](const std::string& v) { ta.batch = parse_u64(v, "batch"); });
  overlay.bind("momentum-stats",
               [&](const std::string& v) { ta.momentum_stats = parse_double(v, "momentum-stats"); });
  overlay.bind("val-fraction",
               [&](const std::string& v) { ta.val_fraction = parse_double(v, "val-fraction"); });
  overlay.bind("min-lr", [&](const std::string& v) { ta.min_lr = parse_double(v, "min-lr"); });
  overlay.bind("tolerance",
               [&](const std::string& v) { ta.tolerance = parse_u64(v, "tolerance"); });
  overlay.bind("stop-grad-stats",
               [&](const std::string& v) { ta.stop_grad_stats = parse_u64(v, "stop-grad-stats"); });
  overlay.bind("out", [&](const std::string& v) { ta.out = v; });

  std::string ev_ck, ev_data, ev_holdout, ev_out;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on one domain");
  eval->add_option("--checkpoint", ev_ck, "Checkpoint directory")->required();
  eval->add_option("--data", ev_data, "Dataset directory")->required();
  eval->add_option("--holdout", ev_holdout, "Domain to evaluate (default: the trained held-out)");
  eval->add_option("--out", ev_out, "Also write the CSV here");

  std::string lam_ck, lam_out;
  auto* lambdas = app.add_subcommand("lambdas", "Report the adjust pairs of a checkpoint");
  lambdas->add_option("--checkpoint", lam_ck, "Checkpoint directory")->required();
  lambdas->add_option("--out", lam_out, "Also write the CSV here");

  AblateArgs aa;
  auto* ablate = app.add_subcommand("ablate-lambda", "Freeze one adjust pair at (1 - v, v)");
  ablate->add_option("--checkpoint", aa.checkpoint, "Checkpoint directory")->required();
  ablate->add_option("--module", aa.module, "Module id, e.g. scnorm3")->required();
  ablate->add_option("--value", aa.value, "Frozen lambda_org")->capture_default_str();
  ablate->add_option("--data", aa.data, "Dataset directory; evaluates when given");
  ablate->add_option("--holdout", aa.holdout, "Domain to evaluate (default: the trained held-out)");
  ablate->add_option("--out", aa.out, "Write the ablated checkpoint here");

  StyleArgs sa;
  auto* style = app.add_subcommand("style-transfer", "Image-level amplitude transfer");
  style->add_option("--mode", sa.mode, "swap | mix | lowfreq")->capture_default_str();
  style->add_option("--content", sa.content, "Content image (.png or .ppm)")->required();
  style->add_option("--style", sa.style, "Style image (.png or .ppm)")->required();
  style->add_option("--ratio", sa.ratio, "Mix ratio in [0, 1]")->capture_default_str();
  style->add_option("--band", sa.band, "Low-frequency band in (0, 0.5]")->capture_default_str();
  style->add_option("--out", sa.out, "Output image (.png or .ppm)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", e.what());
    std::cerr << "run '" << app.get_name() << " --help' for usage\n";
    return kUsage;
  }

  try {
    if (*verify) return run_verify(va);
    if (*selftest) return run_selftest(selftest_seed);
    if (*gen) return run_gen_data(*gen, ga);
    if (*train) {
      KeyValueFile model_keys;
      overlay.apply(*train, ta.config, &model_keys);
      return run_train(ta, model_keys);
    }
    if (*eval) return run_eval(ev_ck, ev_data, ev_holdout, ev_out);
    if (*lambdas) return run_lambdas(lam_ck, lam_out);
    if (*ablate) return run_ablate(aa);
    if (*style) return run_style(sa);
  } catch (const Error& e) {
    error_line(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    error_line("internal", e.what());
    return 1;
  }
  return kOk;
}
