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

#ifndef FREQNORM_IMAGE_IO_H_
#define FREQNORM_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "freqnorm/tensor.h"

namespace freqnorm {

/// 8-bit interleaved RGB.
struct Image8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;
};

/// (1, 3, h, w) in [0, 1] <-> 8-bit via v / 255 and round(v * 255), clamped.
Tensor image_to_tensor(const Image8& img);
Image8 tensor_to_image(const Tensor& t);

std::vector<char> encode_ppm(const Image8& img);
Image8 decode_ppm(const std::vector<char>& bytes, const std::string& origin);
std::vector<char> encode_png(const Image8& img);
Image8 decode_png(const std::vector<char>& bytes, const std::string& origin);

/// Format chosen by extension (.png, .ppm). Writes are atomic. IoError on
/// unreadable, corrupt or unsupported files.
Tensor read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Tensor& t);

}  // namespace freqnorm

#endif  // FREQNORM_IMAGE_IO_H_
