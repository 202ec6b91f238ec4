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

#include "freqnorm/checkpoint.h"

#include <string>
#include <system_error>

#include "freqnorm/errors.h"
#include "freqnorm/tensor_io.h"

namespace freqnorm {

namespace fs = std::filesystem;

namespace {

std::string shape_text(const Shape& s) {
  return std::to_string(s.n) + "," + std::to_string(s.c) + "," + std::to_string(s.h) +
         "," + std::to_string(s.w);
}

Shape parse_shape(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw ConfigError("bad tensor shape '" + text + "'");
  return Shape{parse_u64(parts[0], "n"), parse_u64(parts[1], "c"),
               parse_u64(parts[2], "h"), parse_u64(parts[3], "w")};
}

}  // namespace

void save_checkpoint(Model& model, const fs::path& dir,
                     const std::vector<std::pair<std::string, std::string>>& extra) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());

  KeyValueFile kv;
  kv.set("format", kCheckpointFormat);
  model.spec().store(kv);
  for (const AdjustSlot& s : model.adjust_slots()) {
    kv.set("adjust." + s.module + ".frozen",
           s.params->frozen() ? format_double(s.params->lambda_org()) : "");
  }
  auto write = [&](const std::string& name, const Tensor& t) {
    kv.set("tensor." + name, shape_text(t.shape()));
    write_tensor(dir / (name + ".fnt"), t);
  };
  for (const ParamRef& p : model.parameters()) write(p.name, *p.value);
  for (const BufferRef& b : model.buffers()) write(b.name, *b.value);
  for (const auto& [k, v] : extra) kv.set("meta." + k, v);
  kv.save(dir / "manifest.txt");
}

LoadedCheckpoint load_checkpoint(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.txt";
  if (!fs::exists(manifest)) throw IoError(manifest.string(), "checkpoint manifest not found");
  LoadedCheckpoint out;
  out.manifest = KeyValueFile::load(manifest);
  const KeyValueFile& kv = out.manifest;
  if (kv.require("format") != kCheckpointFormat) {
    throw IoError(manifest.string(), "unsupported checkpoint format '" +
                                         kv.require("format") + "'");
  }
  out.model = std::make_unique<Model>(ModelSpec::load(kv));
  Model& model = *out.model;

  auto read = [&](const std::string& name, Tensor* dst) {
    const Shape expected = parse_shape(kv.require("tensor." + name));
    if (expected != dst->shape()) {
      throw ConfigError("checkpoint tensor " + name + " has shape " + expected.str() +
                        ", model expects " + dst->shape().str());
    }
    Tensor t = read_tensor(dir / (name + ".fnt"));
    if (t.shape() != expected) {
      throw IoError((dir / (name + ".fnt")).string(),
                    "shape " + t.shape().str() + " disagrees with manifest");
    }
    *dst = std::move(t);
  };
  for (const ParamRef& p : model.parameters()) read(p.name, p.value);
  for (const BufferRef& b : model.buffers()) read(b.name, b.value);
  for (const AdjustSlot& s : model.adjust_slots()) {
    const std::string frozen = kv.get("adjust." + s.module + ".frozen").value_or("");
    if (!frozen.empty()) s.params->freeze(parse_double(frozen, "frozen lambda"));
  }
  return out;
}

}  // namespace freqnorm
