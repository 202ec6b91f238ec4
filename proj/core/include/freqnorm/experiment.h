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

#ifndef FREQNORM_EXPERIMENT_H_
#define FREQNORM_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "freqnorm/dataset.h"
#include "freqnorm/model.h"
#include "freqnorm/optimizer.h"

namespace freqnorm {

struct Protocol {
  std::string held_out;
  double val_fraction = 0.2;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  /// 0 means one pass over the training split per epoch.
  std::size_t iterations_per_epoch = 0;
  SgdConfig sgd;
  double min_lr = 0.0;
  std::size_t early_stop_tolerance = 4;
  /// Drives the train/val split, model init and batch order.
  std::uint64_t seed = 0;

  void validate() const;
};

/// Source-domain data only. The held-out domain is never part of it.
struct SourceSplit {
  Tensor train_images;
  std::vector<int> train_labels;
  Tensor val_images;
  std::vector<int> val_labels;
};

/// Pools every domain except `protocol.held_out`, reserving
/// `val_fraction` of each domain for validation. Equal-sized domains hold
/// out the same image indices. LookupError when the held-out domain does
/// not exist.
SourceSplit split_sources(const DomainDataset& ds, const Protocol& protocol);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_acc = 0.0;
  double lr = 0.0;
};

struct FitResult {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains `model` on the split, selecting the epoch with the best
/// validation accuracy (ties keep the earlier epoch) and restoring its
/// weights. Stops after `early_stop_tolerance` consecutive epochs without
/// improvement. AbortedRunError on a non-finite loss.
FitResult fit(Model& model, const SourceSplit& split, const Protocol& protocol,
              const EpochCallback& on_epoch = {});

/// Eval-mode accuracy in [0, 1].
double evaluate(Model& model, const Tensor& images, const std::vector<int>& labels,
                std::size_t batch_size = 128);

struct LambdaRow {
  std::string module;
  std::string position;
  double lambda_norm = 0.0;
  double lambda_org = 0.0;
  bool frozen = false;
};

std::vector<LambdaRow> report_lambdas(Model& model);

struct ResultRecord {
  std::string run_id;
  std::string variant;
  std::string held_out;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  bool early_stopped = false;
  std::vector<LambdaRow> lambdas;
};

std::string make_run_id(Variant variant, const std::string& held_out, std::uint64_t seed);

/// Splits sources, fits a fresh model built from `spec`, and only then
/// evaluates on the held-out domain. `trained` (optional) receives the
/// selected model.
ResultRecord run_experiment(const DomainDataset& ds, const ModelSpec& spec,
                            const Protocol& protocol, const EpochCallback& on_epoch = {},
                            std::unique_ptr<Model>* trained = nullptr);

/// Summary of a leave-one-domain-out sweep: mean held-out accuracy.
double mean_test_accuracy(const std::vector<ResultRecord>& records);

struct AblationResult {
  std::string module;
  double lambda_org = 0.0;
  double test_acc = 0.0;
  bool frozen = false;
};

/// Freezes `module` at (1 - value, value) and re-evaluates. LookupError for
/// an unknown module; DomainError for a value outside [0, 1].
AblationResult fixed_lambda_ablation(Model& model, const std::string& module, double value,
                                     const Tensor& images, const std::vector<int>& labels);

inline constexpr const char* kResultsHeader =
    "run_id,variant,held_out,seed,epoch,train_loss,val_acc,test_acc";
inline constexpr const char* kLambdaHeader = "module,position,lambda_norm,lambda_org";

/// One row per epoch (test_acc empty) and a final row for the selected
/// epoch carrying test_acc.
std::string results_csv(const std::vector<ResultRecord>& records);
std::string lambdas_csv(const std::vector<LambdaRow>& rows);

}  // namespace freqnorm

#endif  // FREQNORM_EXPERIMENT_H_
