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

#include "freqnorm/model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "freqnorm/errors.h"

namespace freqnorm {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kDacP: return "dac_p";
    case Variant::kDacSc: return "dac_sc";
  }
  return "unknown";
}

Variant parse_variant(std::string_view text) {
  if (text == "baseline") return Variant::kBaseline;
  if (text == "dac_p" || text == "dac-p") return Variant::kDacP;
  if (text == "dac_sc" || text == "dac-sc") return Variant::kDacSc;
  throw ConfigError("unknown model variant '" + std::string(text) +
                    "' (expected baseline, dac_p or dac_sc)");
}

// ---------------------------------------------------------------- ModelSpec

void ModelSpec::validate() const {
  if (stages.empty()) throw ConfigError("model: at least one stage required");
  for (const StageSpec& s : stages) {
    if (s.blocks == 0 || s.channels == 0) {
      throw ConfigError("model: stage blocks and channels must be positive");
    }
  }
  if (in_channels == 0 || in_height == 0 || in_width == 0) {
    throw ConfigError("model: input dims must be positive");
  }
  if (classes < 2) throw ConfigError("model: need at least 2 classes");
  if (stem_channels == 0) throw ConfigError("model: stem_channels must be positive");
  std::vector<std::size_t> seen;
  for (std::size_t p : scnorm_positions) {
    if (p == 0 || p > stages.size()) {
      throw ConfigError("model: scnorm position " + std::to_string(p) +
                        " outside stages 1.." + std::to_string(stages.size()));
    }
    if (std::find(seen.begin(), seen.end(), p) != seen.end()) {
      throw ConfigError("model: duplicate scnorm position " + std::to_string(p));
    }
    seen.push_back(p);
  }
  if (!(content_temperature > 0.0) || !(style_temperature > 0.0)) {
    throw ConfigError("model: temperatures must be positive");
  }
  if (!(stats_momentum >= 0.0 && stats_momentum <= 1.0)) {
    throw ConfigError("model: stats momentum must lie in [0, 1]");
  }
}

void ModelSpec::store(KeyValueFile& kv) const {
  std::string st;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i) st += ",";
    st += std::to_string(stages[i].blocks) + "x" + std::to_string(stages[i].channels);
  }
  std::string pos;
  for (std::size_t i = 0; i < scnorm_positions.size(); ++i) {
    if (i) pos += ",";
    pos += std::to_string(scnorm_positions[i]);
  }
  kv.set("model.variant", std::string(to_string(variant)));
  kv.set("model.stages", st);
  kv.set("model.input", std::to_string(in_channels) + "," + std::to_string(in_height) +
                            "," + std::to_string(in_width));
  kv.set("model.classes", std::to_string(classes));
  kv.set("model.stem_channels", std::to_string(stem_channels));
  kv.set("model.scnorm_positions", pos);
  kv.set("model.scnorm_scheme", std::string(to_string(scnorm_scheme)));
  kv.set("model.content_temperature", format_double(content_temperature));
  kv.set("model.style_temperature", format_double(style_temperature));
  kv.set("model.stats_momentum", format_double(stats_momentum));
  kv.set("model.stop_grad_stats", stop_grad_stats ? "1" : "0");
}

ModelSpec ModelSpec::load(const KeyValueFile& kv) {
  ModelSpec s;
  s.variant = parse_variant(kv.require("model.variant"));
  s.stages.clear();
  for (const std::string& item : split(kv.require("model.stages"), ',')) {
    const auto parts = split(item, 'x');
    if (parts.size() != 2) throw ConfigError("model.stages: bad entry '" + item + "'");
    s.stages.push_back({parse_u64(parts[0], "stage blocks"),
                        parse_u64(parts[1], "stage channels")});
  }
  const auto input = split(kv.require("model.input"), ',');
  if (input.size() != 3) throw ConfigError("model.input: expected c,h,w");
  s.in_channels = parse_u64(input[0], "input channels");
  s.in_height = parse_u64(input[1], "input height");
  s.in_width = parse_u64(input[2], "input width");
  s.classes = kv.require_u64("model.classes");
  s.stem_channels = kv.require_u64("model.stem_channels");
  s.scnorm_positions.clear();
  const std::string pos = kv.require("model.scnorm_positions");
  if (!trim(pos).empty()) {
    for (const std::string& p : split(pos, ',')) {
      s.scnorm_positions.push_back(parse_u64(p, "scnorm position"));
    }
  }
  s.scnorm_scheme = parse_norm_scheme(kv.require("model.scnorm_scheme"));
  s.content_temperature = kv.require_double("model.content_temperature");
  s.style_temperature = kv.require_double("model.style_temperature");
  s.stats_momentum = kv.require_double("model.stats_momentum");
  s.stop_grad_stats = kv.require_u64("model.stop_grad_stats") != 0;
  s.validate();
  return s;
}

// ---------------------------------------------------------------- Downsample

Downsample::Downsample(std::size_t in_channels, std::size_t out_channels,
                       DownsampleKind kind, const ModelSpec& spec)
    : kind_(kind), conv_({in_channels, out_channels, 1, 2, 0, false}) {
  switch (kind) {
    case DownsampleKind::kBatchNorm:
      norm_ = std::make_unique<Norm2d>(NormScheme::kBatch, out_channels, true,
                                       spec.stats_momentum);
      break;
    case DownsampleKind::kPCNorm: {
      auto p = std::make_unique<PCNorm>(out_channels, true, spec.stats_momentum);
      p->set_stop_grad_stats(spec.stop_grad_stats);
      norm_ = std::move(p);
      break;
    }
    case DownsampleKind::kCCNorm: {
      auto c = std::make_unique<CCNorm>(out_channels, spec.content_temperature, true,
                                        spec.stats_momentum);
      c->set_stop_grad_stats(spec.stop_grad_stats);
      ccnorm_ = c.get();
      norm_ = std::move(c);
      break;
    }
  }
}

Tensor Downsample::forward(const Tensor& x, Mode mode) {
  return norm_->forward(conv_.forward(x, mode), mode);
}

Tensor Downsample::backward(const Tensor& grad_out) {
  return conv_.backward(norm_->backward(grad_out));
}

void Downsample::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  conv_.collect_params(join_name(prefix, "conv"), out);
  norm_->collect_params(join_name(prefix, "norm"), out);
}

void Downsample::collect_buffers(const std::string& prefix,
                                 std::vector<BufferRef>& out) {
  norm_->collect_buffers(join_name(prefix, "norm"), out);
}

// ---------------------------------------------------------------- BasicBlock

BasicBlock::BasicBlock(std::size_t in_channels, std::size_t out_channels,
                       std::size_t stride, DownsampleKind kind, const ModelSpec& spec)
    : conv1_({in_channels, out_channels, 3, stride, 1, false}),
      norm1_(NormScheme::kBatch, out_channels, true, spec.stats_momentum),
      conv2_({out_channels, out_channels, 3, 1, 1, false}),
      norm2_(NormScheme::kBatch, out_channels, true, spec.stats_momentum) {
  if (stride != 1 || in_channels != out_channels) {
    if (stride != 2) throw ConfigError("basic block: projection requires stride 2");
    downsample_ = std::make_unique<Downsample>(in_channels, out_channels, kind, spec);
  }
}

void BasicBlock::init(Rng& rng) {
  conv1_.init(rng);
  conv2_.init(rng);
  if (downsample_) downsample_->init(rng);
}

Tensor BasicBlock::forward(const Tensor& x, Mode mode) {
  Tensor h = relu1_.forward(norm1_.forward(conv1_.forward(x, mode), mode), mode);
  h = norm2_.forward(conv2_.forward(h, mode), mode);
  const Tensor shortcut = downsample_ ? downsample_->forward(x, mode) : x;
  return relu_out_.forward(h + shortcut, mode);
}

Tensor BasicBlock::backward(const Tensor& grad_out) {
  const Tensor g = relu_out_.backward(grad_out);
  Tensor gx = conv1_.backward(
      norm1_.backward(relu1_.backward(conv2_.backward(norm2_.backward(g)))));
  return gx + (downsample_ ? downsample_->backward(g) : g);
}

void BasicBlock::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  conv1_.collect_params(join_name(prefix, "conv1"), out);
  norm1_.collect_params(join_name(prefix, "norm1"), out);
  conv2_.collect_params(join_name(prefix, "conv2"), out);
  norm2_.collect_params(join_name(prefix, "norm2"), out);
  if (downsample_) downsample_->collect_params(join_name(prefix, "downsample"), out);
}

void BasicBlock::collect_buffers(const std::string& prefix,
                                 std::vector<BufferRef>& out) {
  norm1_.collect_buffers(join_name(prefix, "norm1"), out);
  norm2_.collect_buffers(join_name(prefix, "norm2"), out);
  if (downsample_) downsample_->collect_buffers(join_name(prefix, "downsample"), out);
}

// ---------------------------------------------------------------- Model

namespace {

DownsampleKind downsample_kind(Variant v) {
  switch (v) {
    case Variant::kBaseline: return DownsampleKind::kBatchNorm;
    case Variant::kDacP: return DownsampleKind::kPCNorm;
    case Variant::kDacSc: return DownsampleKind::kCCNorm;
  }
  return DownsampleKind::kBatchNorm;
}

std::string stage_name(std::size_t k) { return "stage" + std::to_string(k); }

}  // namespace

Model::Model(const ModelSpec& spec, std::uint64_t seed)
    : spec_((spec.validate(), spec)),
      stem_conv_({spec.in_channels, spec.stem_channels, 3, 1, 1, false}),
      stem_norm_(NormScheme::kBatch, spec.stem_channels, true, spec.stats_momentum),
      fc_(spec.stages.back().channels, spec.classes) {
  const DownsampleKind kind = downsample_kind(spec.variant);
  std::size_t channels = spec.stem_channels;
  for (std::size_t k = 0; k < spec.stages.size(); ++k) {
    Stage stage;
    for (std::size_t b = 0; b < spec.stages[k].blocks; ++b) {
      const std::size_t out = spec.stages[k].channels;
      stage.blocks.push_back(
          std::make_unique<BasicBlock>(channels, out, b == 0 ? 2 : 1, kind, spec));
      channels = out;
    }
    const bool has_sc =
        spec.variant == Variant::kDacSc &&
        std::find(spec.scnorm_positions.begin(), spec.scnorm_positions.end(), k + 1) !=
            spec.scnorm_positions.end();
    if (has_sc) {
      stage.scnorm = std::make_unique<SCNorm>(channels, spec.scnorm_scheme,
                                              spec.style_temperature, false,
                                              spec.stats_momentum);
      stage.scnorm->set_stop_grad_stats(spec.stop_grad_stats);
    }
    stages_.push_back(std::move(stage));
  }

  Rng rng(derive_seed(seed, 0x6d6f64656cULL));
  stem_conv_.init(rng);
  for (Stage& s : stages_) {
    for (auto& b : s.blocks) b->init(rng);
  }
  fc_.init(rng);
}

Tensor Model::forward(const Tensor& x, Mode mode) {
  const Shape& s = x.shape();
  if (s.c != spec_.in_channels || s.h != spec_.in_height || s.w != spec_.in_width) {
    throw ShapeError("model: input " + s.str() + " does not match spec (" +
                     std::to_string(spec_.in_channels) + "," +
                     std::to_string(spec_.in_height) + "," +
                     std::to_string(spec_.in_width) + ")");
  }
  Tensor h = stem_relu_.forward(stem_norm_.forward(stem_conv_.forward(x, mode), mode),
                                mode);
  for (Stage& st : stages_) {
    for (auto& b : st.blocks) h = b->forward(h, mode);
    if (st.scnorm) h = st.scnorm->forward(h, mode);
  }
  return fc_.forward(pool_.forward(h, mode), mode);
}

Tensor Model::backward(const Tensor& grad_logits) {
  Tensor g = pool_.backward(fc_.backward(grad_logits));
  for (auto st = stages_.rbegin(); st != stages_.rend(); ++st) {
    if (st->scnorm) g = st->scnorm->backward(g);
    for (auto b = st->blocks.rbegin(); b != st->blocks.rend(); ++b) {
      g = (*b)->backward(g);
    }
  }
  return stem_conv_.backward(stem_norm_.backward(stem_relu_.backward(g)));
}

std::vector<ParamRef> Model::parameters() {
  std::vector<ParamRef> out;
  stem_conv_.collect_params("stem.conv", out);
  stem_norm_.collect_params("stem.norm", out);
  for (std::size_t k = 0; k < stages_.size(); ++k) {
    const std::string sn = stage_name(k + 1);
    for (std::size_t b = 0; b < stages_[k].blocks.size(); ++b) {
      stages_[k].blocks[b]->collect_params(sn + ".block" + std::to_string(b + 1), out);
    }
    if (stages_[k].scnorm) stages_[k].scnorm->collect_params(sn + ".scnorm", out);
  }
  fc_.collect_params("fc", out);
  return out;
}

std::vector<BufferRef> Model::buffers() {
  std::vector<BufferRef> out;
  stem_norm_.collect_buffers("stem.norm", out);
  for (std::size_t k = 0; k < stages_.size(); ++k) {
    const std::string sn = stage_name(k + 1);
    for (std::size_t b = 0; b < stages_[k].blocks.size(); ++b) {
      stages_[k].blocks[b]->collect_buffers(sn + ".block" + std::to_string(b + 1), out);
    }
    if (stages_[k].scnorm) stages_[k].scnorm->collect_buffers(sn + ".scnorm", out);
  }
  return out;
}

std::size_t Model::parameter_count() {
  std::size_t total = 0;
  for (const ParamRef& p : parameters()) total += p.value->numel();
  return total;
}

void Model::zero_grad() {
  for (ParamRef& p : parameters()) {
    std::fill(p.grad->data().begin(), p.grad->data().end(), 0.0);
  }
}

std::vector<AdjustSlot> Model::adjust_slots() {
  std::vector<AdjustSlot> out;
  for (std::size_t k = 0; k < stages_.size(); ++k) {
    const std::string sn = stage_name(k + 1);
    CCNorm* cc = stages_[k].blocks.front()->downsample()
                     ? stages_[k].blocks.front()->downsample()->ccnorm()
                     : nullptr;
    if (cc) {
      out.push_back({"ccnorm" + std::to_string(k + 1), sn + ".downsample", &cc->adjust()});
    }
  }
  for (std::size_t k = 0; k < stages_.size(); ++k) {
    if (stages_[k].scnorm) {
      out.push_back({"scnorm" + std::to_string(k + 1), stage_name(k + 1) + ".end",
                     &stages_[k].scnorm->adjust()});
    }
  }
  return out;
}

AdjustSlot Model::adjust(const std::string& module) {
  for (const AdjustSlot& s : adjust_slots()) {
    if (s.module == module) return s;
  }
  std::string known;
  for (const AdjustSlot& s : adjust_slots()) known += (known.empty() ? "" : ", ") + s.module;
  throw LookupError("no adjust module named '" + module + "' (have: " +
                    (known.empty() ? "none" : known) + ")");
}

std::size_t Model::copy_matching(Model& from) {
  std::map<std::string, const Tensor*> src;
  for (const ParamRef& p : from.parameters()) src[p.name] = p.value;
  for (const BufferRef& b : from.buffers()) src[b.name] = b.value;
  std::size_t copied = 0;
  auto take = [&](const std::string& name, Tensor* dst) {
    auto it = src.find(name);
    if (it == src.end() || it->second->shape() != dst->shape()) return;
    *dst = *it->second;
    ++copied;
  };
  for (const ParamRef& p : parameters()) take(p.name, p.value);
  for (const BufferRef& b : buffers()) take(b.name, b.value);
  return copied;
}

Downsample* Model::downsample(std::size_t stage) {
  if (stage == 0 || stage > stages_.size()) {
    throw LookupError("no stage " + std::to_string(stage));
  }
  return stages_[stage - 1].blocks.front()->downsample();
}

SCNorm* Model::scnorm(std::size_t stage) {
  if (stage == 0 || stage > stages_.size()) {
    throw LookupError("no stage " + std::to_string(stage));
  }
  return stages_[stage - 1].scnorm.get();
}

}  // namespace freqnorm
