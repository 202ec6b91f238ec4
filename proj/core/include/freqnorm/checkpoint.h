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

#ifndef FREQNORM_CHECKPOINT_H_
#define FREQNORM_CHECKPOINT_H_

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "freqnorm/keyvalue.h"
#include "freqnorm/model.h"

namespace freqnorm {

inline constexpr const char* kCheckpointFormat = "freqnorm-checkpoint-1";

/// Writes `dir/manifest.txt` plus one tensor file per parameter and buffer.
/// The manifest records the model spec, frozen adjust pairs, tensor shapes
/// and any `extra` entries (stored under "meta.").
void save_checkpoint(Model& model, const std::filesystem::path& dir,
                     const std::vector<std::pair<std::string, std::string>>& extra = {});

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  KeyValueFile manifest;
};

/// IoError for missing or corrupt files; ConfigError for a manifest that
/// does not describe the stored tensors.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace freqnorm

#endif  // FREQNORM_CHECKPOINT_H_
