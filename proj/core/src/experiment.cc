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

#include "freqnorm/experiment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "freqnorm/errors.h"
#include "freqnorm/keyvalue.h"
#include "freqnorm/nn_layers.h"
#include "freqnorm/rng.h"

namespace freqnorm {

namespace {

constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kOrderStream = 0x6f72646572ULL;

std::vector<int> gather_labels(const std::vector<int>& labels,
                               const std::vector<std::size_t>& rows) {
  std::vector<int> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = labels[rows[i]];
  return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  std::size_t n = 0;
  for (const Tensor& t : parts) n += t.shape().n;
  const Shape& s = parts.front().shape();
  Tensor out = Tensor::zeros({n, s.c, s.h, s.w});
  auto dst = out.data().begin();
  for (const Tensor& t : parts) dst = std::copy(t.data().begin(), t.data().end(), dst);
  return out;
}

struct Snapshot {
  std::vector<Tensor> values;
};

Snapshot take_snapshot(Model& model) {
  Snapshot s;
  for (const ParamRef& p : model.parameters()) s.values.push_back(*p.value);
  for (const BufferRef& b : model.buffers()) s.values.push_back(*b.value);
  return s;
}

void restore_snapshot(Model& model, const Snapshot& s) {
  std::size_t i = 0;
  for (const ParamRef& p : model.parameters()) *p.value = s.values[i++];
  for (const BufferRef& b : model.buffers()) *b.value = s.values[i++];
}

}  // namespace

void Protocol::validate() const {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("protocol: val_fraction must lie in (0, 1)");
  }
  if (batch_size == 0) throw ConfigError("protocol: batch_size must be positive");
  if (epochs == 0) throw ConfigError("protocol: epochs must be positive");
  if (early_stop_tolerance == 0) throw ConfigError("protocol: tolerance must be positive");
  if (!(min_lr >= 0.0)) throw ConfigError("protocol: min_lr must be >= 0");
}

SourceSplit split_sources(const DomainDataset& ds, const Protocol& protocol) {
  protocol.validate();
  (void)ds.domain(protocol.held_out);
  std::vector<Tensor> train_parts, val_parts;
  SourceSplit split;
  for (std::size_t d = 0; d < ds.domains.size(); ++d) {
    const DomainData& dom = ds.domains[d];
    if (dom.name == protocol.held_out) continue;
    const std::size_t n = dom.labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Same permutation for every source domain: image i of each domain shows
    // the same scene, so a scene lands in val everywhere or nowhere.
    Rng rng(derive_seed(protocol.seed, kSplitStream));
    rng.shuffle(order);
    const auto n_val = static_cast<std::size_t>(
        std::llround(protocol.val_fraction * static_cast<double>(n)));
    if (n_val == 0 || n_val >= n) {
      throw ConfigError("protocol: domain '" + dom.name + "' too small to split");
    }
    std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(val.begin(), val.end());
    std::sort(train.begin(), train.end());
    train_parts.push_back(gather_rows(dom.images, train));
    val_parts.push_back(gather_rows(dom.images, val));
    const auto tl = gather_labels(dom.labels, train);
    const auto vl = gather_labels(dom.labels, val);
    split.train_labels.insert(split.train_labels.end(), tl.begin(), tl.end());
    split.val_labels.insert(split.val_labels.end(), vl.begin(), vl.end());
  }
  if (train_parts.empty()) throw ConfigError("protocol: no source domains left");
  split.train_images = concat_rows(train_parts);
  split.val_images = concat_rows(val_parts);
  return split;
}

double evaluate(Model& model, const Tensor& images, const std::vector<int>& labels,
                std::size_t batch_size) {
  const std::size_t n = images.shape().n;
  if (labels.size() != n) throw ShapeError("evaluate: label count mismatch");
  if (batch_size == 0) throw ConfigError("evaluate: batch_size must be positive");
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    std::vector<std::size_t> rows(end - start);
    std::iota(rows.begin(), rows.end(), start);
    const std::vector<int> pred = predict(model.forward(gather_rows(images, rows), Mode::kEval));
    for (std::size_t i = 0; i < rows.size(); ++i) correct += pred[i] == labels[start + i];
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

FitResult fit(Model& model, const SourceSplit& split, const Protocol& protocol,
              const EpochCallback& on_epoch) {
  protocol.validate();
  const std::size_t n = split.train_labels.size();
  if (n == 0 || split.train_images.shape().n != n) {
    throw ShapeError("fit: empty or inconsistent training split");
  }
  const std::size_t batch = std::min(protocol.batch_size, n);
  const std::size_t iterations =
      protocol.iterations_per_epoch ? protocol.iterations_per_epoch : std::max<std::size_t>(1, n / batch);

  Sgd sgd(model.parameters(), protocol.sgd);
  Rng order_rng(derive_seed(protocol.seed, kOrderStream));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n;  // forces a shuffle before the first batch

  FitResult result;
  Snapshot best = take_snapshot(model);
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= protocol.epochs; ++epoch) {
    const double lr = cosine_lr(protocol.sgd.lr, protocol.min_lr, epoch - 1, protocol.epochs);
    sgd.set_lr(lr);
    double loss_sum = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
      if (cursor + batch > n) {
        order_rng.shuffle(order);
        cursor = 0;
      }
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                    order.begin() + static_cast<std::ptrdiff_t>(cursor + batch));
      cursor += batch;
      const Tensor x = gather_rows(split.train_images, rows);
      const std::vector<int> y = gather_labels(split.train_labels, rows);
      model.zero_grad();
      const Tensor logits = model.forward(x, Mode::kTrain);
      Tensor grad;
      const double loss = softmax_cross_entropy(logits, y, &grad);
      if (!std::isfinite(loss)) {
        throw AbortedRunError("non-finite training loss " + format_double(loss) +
                              " at epoch " + std::to_string(epoch) + ", iteration " +
                              std::to_string(it + 1) + " (lr " + format_double(lr) + ")");
      }
      model.backward(grad);
      sgd.step();
      loss_sum += loss;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(iterations);
    rec.val_acc = evaluate(model, split.val_images, split.val_labels);
    rec.lr = lr;
    result.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (result.best_epoch == 0 || rec.val_acc > result.best_val_acc) {
      result.best_epoch = epoch;
      result.best_val_acc = rec.val_acc;
      best = take_snapshot(model);
      stale = 0;
    } else if (++stale >= protocol.early_stop_tolerance) {
      result.early_stopped = epoch < protocol.epochs;
      break;
    }
  }
  restore_snapshot(model, best);
  return result;
}

std::vector<LambdaRow> report_lambdas(Model& model) {
  std::vector<LambdaRow> rows;
  for (const AdjustSlot& s : model.adjust_slots()) {
    rows.push_back({s.module, s.position, s.params->lambda_norm(), s.params->lambda_org(),
                    s.params->frozen()});
  }
  return rows;
}

std::string make_run_id(Variant variant, const std::string& held_out, std::uint64_t seed) {
  return std::string(to_string(variant)) + "-" + held_out + "-s" + std::to_string(seed);
}

ResultRecord run_experiment(const DomainDataset& ds, const ModelSpec& spec,
                            const Protocol& protocol, const EpochCallback& on_epoch,
                            std::unique_ptr<Model>* trained) {
  ResultRecord rec;
  rec.variant = std::string(to_string(spec.variant));
  rec.held_out = protocol.held_out;
  rec.seed = protocol.seed;
  rec.run_id = make_run_id(spec.variant, protocol.held_out, protocol.seed);

  auto model = std::make_unique<Model>(spec, derive_seed(protocol.seed, kInitStream));
  {
    const SourceSplit split = split_sources(ds, protocol);
    const FitResult fr = fit(*model, split, protocol, on_epoch);
    rec.epochs = fr.epochs;
    rec.best_epoch = fr.best_epoch;
    rec.val_acc = fr.best_val_acc;
    rec.early_stopped = fr.early_stopped;
  }
  // Selection is final; only now is the held-out domain touched.
  const DomainData& test = ds.domain(protocol.held_out);
  rec.test_acc = evaluate(*model, test.images, test.labels);
  rec.lambdas = report_lambdas(*model);
  if (trained) *trained = std::move(model);
  return rec;
}

double mean_test_accuracy(const std::vector<ResultRecord>& records) {
  if (records.empty()) return 0.0;
  double total = 0.0;
  for (const ResultRecord& r : records) total += r.test_acc;
  return total / static_cast<double>(records.size());
}

AblationResult fixed_lambda_ablation(Model& model, const std::string& module, double value,
                                     const Tensor& images, const std::vector<int>& labels) {
  AdjustSlot slot = model.adjust(module);
  slot.params->freeze(value);
  AblationResult r;
  r.module = module;
  r.lambda_org = value;
  r.frozen = slot.params->frozen();
  r.test_acc = evaluate(model, images, labels);
  return r;
}

std::string results_csv(const std::vector<ResultRecord>& records) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const ResultRecord& r : records) {
    const std::string prefix = r.run_id + "," + r.variant + "," + r.held_out + "," +
                               std::to_string(r.seed) + ",";
    for (const EpochRecord& e : r.epochs) {
      out += prefix + std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," +
             format_double(e.val_acc) + ",\n";
    }
    double best_loss = 0.0;
    for (const EpochRecord& e : r.epochs) {
      if (e.epoch == r.best_epoch) best_loss = e.train_loss;
    }
    out += prefix + std::to_string(r.best_epoch) + "," + format_double(best_loss) + "," +
           format_double(r.val_acc) + "," + format_double(r.test_acc) + "\n";
  }
  return out;
}

std::string lambdas_csv(const std::vector<LambdaRow>& rows) {
  std::string out = std::string(kLambdaHeader) + "\n";
  for (const LambdaRow& r : rows) {
    out += r.module + "," + r.position + "," + format_double(r.lambda_norm) + "," +
           format_double(r.lambda_org) + "\n";
  }
  return out;
}

}  // namespace freqnorm
