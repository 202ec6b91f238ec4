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

#include "freqnorm/dataset.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <system_error>

#include "freqnorm/errors.h"
#include "freqnorm/parallel.h"
#include "freqnorm/rng.h"
#include "freqnorm/spectral.h"
#include "freqnorm/tensor_io.h"

namespace freqnorm {

namespace fs = std::filesystem;

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig c;
  c.domains = {
      {"photo", 0.0, {1.0, 1.0, 1.0}, 0.0, 0.02},
      {"painting", 1.5, {1.15, 0.95, 0.7}, 0.05, 0.03},
      {"cartoon", -0.75, {0.7, 1.2, 1.1}, -0.05, 0.02},
      {"sketch", -1.5, {0.55, 0.55, 0.55}, 0.25, 0.06},
  };
  return c;
}

void GeneratorConfig::validate() const {
  if (domains.size() < 3) throw ConfigError("dataset: need at least 3 domains");
  if (classes < 4 || classes > kShapeKinds) {
    throw ConfigError("dataset: classes must lie in [4, " + std::to_string(kShapeKinds) +
                      "], got " + std::to_string(classes));
  }
  if (images_per_class < 50) {
    throw ConfigError("dataset: images_per_class must be >= 50, got " +
                      std::to_string(images_per_class));
  }
  if (size < 8) throw ConfigError("dataset: size must be >= 8");
  std::set<std::string> names;
  for (const DomainStyle& d : domains) {
    if (d.name.empty() || d.name.find_first_of(",=#/ \t") != std::string::npos) {
      throw ConfigError("dataset: invalid domain name '" + d.name + "'");
    }
    if (!names.insert(d.name).second) {
      throw ConfigError("dataset: duplicate domain '" + d.name + "'");
    }
    bool finite = std::isfinite(d.beta) && std::isfinite(d.brightness) &&
                  std::isfinite(d.noise) && d.noise >= 0.0;
    for (double g : d.gains) finite = finite && std::isfinite(g);
    if (!finite) throw ConfigError("dataset: bad style values for '" + d.name + "'");
  }
}

GeneratorConfig GeneratorConfig::from_keyvalue(const KeyValueFile& kv) {
  GeneratorConfig c = defaults();
  c.seed = kv.get_u64("seed", c.seed);
  c.classes = kv.get_u64("classes", c.classes);
  c.images_per_class = kv.get_u64("images_per_class", c.images_per_class);
  c.size = kv.get_u64("size", c.size);
  if (auto names = kv.get("domains")) {
    std::vector<DomainStyle> styles;
    for (const std::string& raw : split(*names, ',')) {
      const std::string name = trim(raw);
      DomainStyle s;
      s.name = name;
      for (const DomainStyle& d : c.domains) {
        if (d.name == name) s = d;
      }
      styles.push_back(s);
    }
    c.domains = styles;
  }
  for (DomainStyle& d : c.domains) {
    const std::string p = "domain." + d.name + ".";
    d.beta = kv.get_double(p + "beta", d.beta);
    d.brightness = kv.get_double(p + "brightness", d.brightness);
    d.noise = kv.get_double(p + "noise", d.noise);
    if (auto g = kv.get(p + "gains")) {
      const auto parts = split(*g, ',');
      if (parts.size() != 3) throw ConfigError(p + "gains: expected three values");
      for (std::size_t i = 0; i < 3; ++i) d.gains[i] = parse_double(parts[i], p + "gains");
    }
  }
  c.validate();
  return c;
}

void GeneratorConfig::store(KeyValueFile& kv) const {
  kv.set("seed", std::to_string(seed));
  kv.set("classes", std::to_string(classes));
  kv.set("images_per_class", std::to_string(images_per_class));
  kv.set("size", std::to_string(size));
  std::string names;
  for (const DomainStyle& d : domains) names += (names.empty() ? "" : ",") + d.name;
  kv.set("domains", names);
  for (const DomainStyle& d : domains) {
    const std::string p = "domain." + d.name + ".";
    kv.set(p + "beta", format_double(d.beta));
    kv.set(p + "gains", format_double(d.gains[0]) + "," + format_double(d.gains[1]) +
                            "," + format_double(d.gains[2]));
    kv.set(p + "brightness", format_double(d.brightness));
    kv.set(p + "noise", format_double(d.noise));
  }
}

const DomainData& DomainDataset::domain(const std::string& name) const {
  for (const DomainData& d : domains) {
    if (d.name == name) return d;
  }
  std::string known;
  for (const DomainData& d : domains) known += (known.empty() ? "" : ", ") + d.name;
  throw LookupError("unknown domain '" + name + "' (have: " + known + ")");
}

std::vector<std::string> DomainDataset::domain_names() const {
  std::vector<std::string> out;
  for (const DomainData& d : domains) out.push_back(d.name);
  return out;
}

namespace {

bool inside(ShapeKind kind, double u, double v) {
  switch (kind) {
    case ShapeKind::kDisk: return u * u + v * v <= 1.0;
    case ShapeKind::kSquare: return std::max(std::abs(u), std::abs(v)) <= 0.8;
    case ShapeKind::kTriangle: {
      // Vertices (0,-1), (0.866,0.5), (-0.866,0.5).
      if (v > 0.5) return false;
      const double half = (v + 1.0) * 0.866 / 1.5;
      return v >= -1.0 && std::abs(u) <= half;
    }
    case ShapeKind::kCross:
      return (std::abs(u) <= 0.3 && std::abs(v) <= 1.0) ||
             (std::abs(v) <= 0.3 && std::abs(u) <= 1.0);
    case ShapeKind::kRing: {
      const double r2 = u * u + v * v;
      return r2 <= 1.0 && r2 >= 0.55 * 0.55;
    }
  }
  return false;
}

double luminance(const std::array<double, 3>& c) {
  return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
}

std::uint64_t content_stream(std::size_t cls, std::size_t index) {
  return (static_cast<std::uint64_t>(cls) << 32) | static_cast<std::uint64_t>(index);
}

}  // namespace

Tensor render_content(const GeneratorConfig& config, std::size_t cls, std::size_t index) {
  if (cls >= kShapeKinds) throw DomainError("render_content: class out of range");
  Rng rng(derive_seed(config.seed, content_stream(cls, index)));
  std::array<double, 3> bg{}, fg{};
  for (double& v : bg) v = rng.uniform(0.15, 0.85);
  bool ok = false;
  for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
    for (double& v : fg) v = rng.uniform(0.05, 0.95);
    ok = std::abs(luminance(fg) - luminance(bg)) >= 0.25;
  }
  if (!ok) {
    for (std::size_t i = 0; i < 3; ++i) fg[i] = 1.0 - bg[i];
  }
  const double size = static_cast<double>(config.size);
  const double cx = rng.uniform(0.35, 0.65) * size;
  const double cy = rng.uniform(0.35, 0.65) * size;
  const double radius = rng.uniform(0.22, 0.34) * size;
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const ShapeKind kind = static_cast<ShapeKind>(cls);

  const std::size_t n = config.size;
  Tensor img = Tensor::zeros({1, 3, n, n});
  constexpr int kSub = 4;
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      int hits = 0;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          const double px = static_cast<double>(x) + (sx + 0.5) / kSub - cx;
          const double py = static_cast<double>(y) + (sy + 0.5) / kSub - cy;
          const double u = (ct * px + st * py) / radius;
          const double v = (-st * px + ct * py) / radius;
          hits += inside(kind, u, v) ? 1 : 0;
        }
      }
      const double cover = static_cast<double>(hits) / (kSub * kSub);
      for (std::size_t c = 0; c < 3; ++c) {
        img.at(0, c, y, x) = cover * fg[c] + (1.0 - cover) * bg[c];
      }
    }
  }
  return img;
}

Tensor apply_style(const Tensor& image, const DomainStyle& style,
                   std::uint64_t noise_seed) {
  const Shape& s = image.shape();
  if (s.n != 1 || s.c != 3) throw ShapeError("apply_style: expected (1,3,h,w)");
  Tensor out = image;
  if (style.beta != 0.0) {
    for (std::size_t c = 0; c < 3; ++c) {
      const Grid g = slice(image, 0, c);
      ComplexGrid F = fft2_fast(g);
      for (std::size_t v = 0; v < s.h; ++v) {
        const double fv = v <= s.h / 2 ? static_cast<double>(v)
                                       : static_cast<double>(v) - static_cast<double>(s.h);
        for (std::size_t u = 0; u < s.w; ++u) {
          const double fu = u <= s.w / 2 ? static_cast<double>(u)
                                         : static_cast<double>(u) - static_cast<double>(s.w);
          const double r = std::hypot(fu, fv);
          if (r == 0.0) continue;
          const double gain = std::pow(r / kFilterReferenceRadius, -style.beta);
          F.re[v * s.w + u] *= gain;
          F.im[v * s.w + u] *= gain;
        }
      }
      Grid filtered = ifft2_fast(F);
      double mean = 0.0;
      for (double x : g.v) mean += x;
      mean /= static_cast<double>(g.v.size());
      double var0 = 0.0, var1 = 0.0;
      for (std::size_t i = 0; i < g.v.size(); ++i) {
        var0 += (g.v[i] - mean) * (g.v[i] - mean);
        var1 += (filtered.v[i] - mean) * (filtered.v[i] - mean);
      }
      const double ratio = var1 > 0.0 ? std::sqrt(var0 / var1) : 1.0;
      for (double& x : filtered.v) x = mean + (x - mean) * ratio;
      set_slice(out, 0, c, filtered);
    }
  }
  Rng rng(noise_seed);
  for (std::size_t c = 0; c < 3; ++c) {
    for (double& x : out.plane(0, c)) {
      x = style.gains[c] * x + style.brightness;
      if (style.noise > 0.0) x += style.noise * rng.normal();
      x = std::clamp(x, 0.0, 1.0);
    }
  }
  return out;
}

DomainDataset generate(const GeneratorConfig& config) {
  config.validate();
  DomainDataset ds;
  ds.config = config;
  const std::size_t total = config.classes * config.images_per_class;
  const std::size_t plane = config.size * config.size;
  std::vector<Tensor> contents(total);
  // Interleave classes so any prefix of a domain is class balanced.
  parallel_for(total, [&](std::size_t j) {
    contents[j] = render_content(config, j % config.classes, j / config.classes);
  });
  // The noise pattern belongs to the scene; a domain only sets its strength,
  // so the same scene keeps its phase across domains.
  const std::uint64_t noise_seed = derive_seed(config.seed, 0x4e4f495345ULL);
  for (const DomainStyle& style : config.domains) {
    DomainData data;
    data.name = style.name;
    data.images = Tensor::zeros({total, 3, config.size, config.size});
    data.labels.resize(total);
    parallel_for(total, [&](std::size_t j) {
      const Tensor styled = apply_style(contents[j], style, derive_seed(noise_seed, j));
      std::copy(styled.data().begin(), styled.data().end(),
                data.images.data().begin() + static_cast<std::ptrdiff_t>(j * 3 * plane));
      data.labels[j] = static_cast<int>(j % config.classes);
    });
    ds.domains.push_back(std::move(data));
  }
  return ds;
}

void save_dataset(const DomainDataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
  KeyValueFile kv;
  kv.set("format", "freqnorm-dataset-1");
  ds.config.store(kv);
  for (const DomainData& d : ds.domains) {
    write_tensor(dir / (d.name + ".images.fnt"), d.images);
    Tensor labels = Tensor::zeros({d.labels.size(), 1, 1, 1});
    for (std::size_t i = 0; i < d.labels.size(); ++i) labels[i] = d.labels[i];
    write_tensor(dir / (d.name + ".labels.fnt"), labels);
    kv.set("domain." + d.name + ".count", std::to_string(d.labels.size()));
  }
  kv.save(dir / "manifest.txt");
}

GeneratorConfig load_dataset_config(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.txt";
  if (!fs::exists(manifest)) throw IoError(manifest.string(), "dataset manifest not found");
  const KeyValueFile kv = KeyValueFile::load(manifest);
  if (kv.get("format").value_or("") != "freqnorm-dataset-1") {
    throw IoError(manifest.string(), "not a freqnorm dataset manifest");
  }
  return GeneratorConfig::from_keyvalue(kv);
}

DomainData load_domain(const fs::path& dir, const std::string& name) {
  const GeneratorConfig config = load_dataset_config(dir);
  bool known = false;
  for (const DomainStyle& d : config.domains) known = known || d.name == name;
  if (!known) throw LookupError("dataset has no domain '" + name + "'");
  DomainData d;
  d.name = name;
  const fs::path ip = dir / (name + ".images.fnt");
  const fs::path lp = dir / (name + ".labels.fnt");
  d.images = read_tensor(ip);
  const Tensor labels = read_tensor(lp);
  const Shape& s = d.images.shape();
  if (s.c != 3 || s.h != config.size || s.w != config.size) {
    throw IoError(ip.string(), "image tensor shape " + s.str() + " disagrees with manifest");
  }
  if (labels.numel() != s.n) {
    throw IoError(lp.string(), "label count disagrees with image count");
  }
  d.labels.resize(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double v = labels[i];
    if (!(v >= 0.0 && v < static_cast<double>(config.classes)) || v != std::floor(v)) {
      throw IoError(lp.string(), "label " + format_double(v) + " out of range");
    }
    d.labels[i] = static_cast<int>(v);
  }
  return d;
}

DomainDataset load_dataset(const fs::path& dir) {
  DomainDataset ds;
  ds.config = load_dataset_config(dir);
  for (const DomainStyle& s : ds.config.domains) ds.domains.push_back(load_domain(dir, s.name));
  return ds;
}

Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& rows) {
  const Shape& s = t.shape();
  const std::size_t row = s.c * s.h * s.w;
  Tensor out = Tensor::zeros({rows.size(), s.c, s.h, s.w});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= s.n) throw ShapeError("gather_rows: row out of range");
    std::copy_n(t.data().begin() + static_cast<std::ptrdiff_t>(rows[i] * row), row,
                out.data().begin() + static_cast<std::ptrdiff_t>(i * row));
  }
  return out;
}

}  // namespace freqnorm
