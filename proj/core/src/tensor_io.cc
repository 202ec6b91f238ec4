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

#include "freqnorm/tensor_io.h"

#include <unistd.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "freqnorm/errors.h"

namespace freqnorm {
namespace {

constexpr std::size_t kHeaderBytes = 8 + 4 * 8;

void put_u64(char* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  }
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(p[i]);
  }
  return v;
}

}  // namespace

std::vector<char> encode_tensor(const Tensor& t) {
  std::vector<char> out(kHeaderBytes + 8 * t.numel());
  std::memcpy(out.data(), kTensorMagic.data(), kTensorMagic.size());
  char* p = out.data() + kTensorMagic.size();
  const Shape& s = t.shape();
  for (std::size_t d : {s.n, s.c, s.h, s.w}) {
    put_u64(p, d);
    p += 8;
  }
  for (double x : t.data()) {
    put_u64(p, std::bit_cast<std::uint64_t>(x));
    p += 8;
  }
  return out;
}

Tensor decode_tensor(const std::vector<char>& bytes, const std::string& origin) {
  if (bytes.size() < kHeaderBytes ||
      std::memcmp(bytes.data(), kTensorMagic.data(), kTensorMagic.size()) != 0) {
    throw IoError(origin, "not a tensor file (bad magic or short header)");
  }
  std::uint64_t dims[4];
  for (int i = 0; i < 4; ++i) dims[i] = get_u64(bytes.data() + 8 + 8 * i);
  Shape shape{dims[0], dims[1], dims[2], dims[3]};
  try {
    validate_shape(shape);
  } catch (const ShapeError& e) {
    throw IoError(origin, std::string("corrupt header: ") + e.what());
  }
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (payload != 8 * shape.numel()) {
    throw IoError(origin, "payload of " + std::to_string(payload) +
                              " bytes does not match shape " + shape.str());
  }
  std::vector<double> data(shape.numel());
  const char* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<double>(get_u64(p + 8 * i));
  }
  return Tensor::from_data(shape, std::move(data));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string(), "cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError(tmp.string(), "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path.string(), "rename failed");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return ss.str();
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  const std::vector<char> bytes = encode_tensor(t);
  write_file_atomic(path, std::string_view(bytes.data(), bytes.size()));
}

Tensor read_tensor(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  return decode_tensor(std::vector<char>(raw.begin(), raw.end()), path.string());
}

}  // namespace freqnorm
