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

#ifndef FREQNORM_TENSOR_IO_H_
#define FREQNORM_TENSOR_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "freqnorm/tensor.h"

namespace freqnorm {

// Binary layout: "FNTENSR1", then n, c, h, w as little-endian u64, then
// n*c*h*w little-endian IEEE-754 doubles in row-major NCHW order.
inline constexpr std::string_view kTensorMagic = "FNTENSR1";

std::vector<char> encode_tensor(const Tensor& t);
/// Throws IoError (with `origin` as the path) on bad magic, truncation, or
/// trailing bytes.
Tensor decode_tensor(const std::vector<char>& bytes, const std::string& origin);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace freqnorm

#endif  // FREQNORM_TENSOR_IO_H_
