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

#ifndef FREQNORM_DATASET_H_
#define FREQNORM_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "freqnorm/keyvalue.h"
#include "freqnorm/tensor.h"

namespace freqnorm {

enum class ShapeKind { kDisk, kSquare, kTriangle, kCross, kRing };
inline constexpr std::size_t kShapeKinds = 5;

/// Per-domain appearance. The amplitude filter multiplies every non-DC
/// Fourier bin by (r / kFilterReferenceRadius)^(-beta), r in cycles per
/// image, then restores the channel's original spatial standard deviation.
/// Afterwards x -> gain[c] * x + brightness, plus N(0, noise^2), clipped to
/// [0, 1].
struct DomainStyle {
  std::string name;
  double beta = 0.0;
  std::array<double, 3> gains = {1.0, 1.0, 1.0};
  double brightness = 0.0;
  double noise = 0.0;
};

inline constexpr double kFilterReferenceRadius = 4.0;

struct GeneratorConfig {
  std::uint64_t seed = 7;
  std::size_t classes = 5;
  std::size_t images_per_class = 200;
  std::size_t size = 32;
  std::vector<DomainStyle> domains;

  /// Four domains with distinct spectral slopes, color casts and noise.
  static GeneratorConfig defaults();

  /// ConfigError on fewer than 3 domains, fewer than 4 classes (or more
  /// than kShapeKinds), fewer than 50 images per class, size < 8, duplicate
  /// domain names or non-finite style values.
  void validate() const;

  /// Keys: seed, classes, images_per_class, size, domains (comma list) and
  /// domain.<name>.{beta,gains,brightness,noise}. Missing keys keep defaults.
  static GeneratorConfig from_keyvalue(const KeyValueFile& kv);
  void store(KeyValueFile& kv) const;
};

struct DomainData {
  std::string name;
  Tensor images;            // (n, 3, size, size) in [0, 1]
  std::vector<int> labels;  // n entries in [0, classes)
};

struct DomainDataset {
  GeneratorConfig config;
  std::vector<DomainData> domains;

  /// LookupError naming the known domains.
  const DomainData& domain(const std::string& name) const;
  std::vector<std::string> domain_names() const;
};

/// Content (shape, colors, placement) for image i of class k is drawn from
/// a stream that depends only on (seed, k, i), so every domain renders the
/// same scenes and differs only by its style.
DomainDataset generate(const GeneratorConfig& config);

/// Renders the unstyled scene for (class, index) as a (1, 3, size, size)
/// tensor.
Tensor render_content(const GeneratorConfig& config, std::size_t cls, std::size_t index);

/// Applies `style` to a (1, 3, h, w) image; `noise_seed` drives the noise.
Tensor apply_style(const Tensor& image, const DomainStyle& style,
                   std::uint64_t noise_seed);

/// Directory layout: manifest.txt, <domain>.images.fnt, <domain>.labels.fnt.
void save_dataset(const DomainDataset& ds, const std::filesystem::path& dir);
DomainDataset load_dataset(const std::filesystem::path& dir);
/// Loads the manifest and a single domain's tensors.
DomainData load_domain(const std::filesystem::path& dir, const std::string& name);
GeneratorConfig load_dataset_config(const std::filesystem::path& dir);

/// Gathers the given rows of a (n, c, h, w) tensor.
Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& rows);

}  // namespace freqnorm

#endif  // FREQNORM_DATASET_H_
