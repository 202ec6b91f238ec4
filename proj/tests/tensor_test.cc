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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "freqnorm/errors.h"
#include "freqnorm/keyvalue.h"
#include "freqnorm/parallel.h"
#include "freqnorm/tensor.h"
#include "freqnorm/tensor_io.h"
#include "oracles.h"

namespace freqnorm {
namespace {

TEST(TensorTest, ZerosHasRequestedShape) {
  const Tensor a = Tensor::zeros({1, 1, 2, 2});
  EXPECT_EQ(a.numel(), 4u);
  for (double x : a.data()) EXPECT_EQ(x, 0.0);
  const Tensor b = Tensor::zeros({2, 3, 4, 4});
  EXPECT_EQ(b.numel(), 96u);
  EXPECT_EQ(max_abs(b), 0.0);
}

TEST(TensorTest, ZeroDimIsShapeError) {
  EXPECT_THROW(Tensor::zeros({1, 0, 2, 2}), ShapeError);
  EXPECT_THROW(Tensor::from_data({1, 1, 2, 2}, {1.0, 2.0}), ShapeError);
  const std::size_t huge = std::size_t{1} << 40;
  EXPECT_THROW(Tensor::zeros({huge, huge, 1, 1}), ShapeError);
}

TEST(TensorTest, MapChannelSlicesIdentityAndDoubling) {
  std::mt19937_64 gen(1);
  const Tensor t = oracle::random_tensor({2, 2, 3, 3}, gen);
  EXPECT_EQ(map_channel_slices(t, [](const Grid& g) { return g; }), t);
  const Tensor doubled = map_channel_slices(t, [](const Grid& g) {
    Grid out = g;
    for (double& x : out.v) x *= 2.0;
    return out;
  });
  for (std::size_t i = 0; i < t.numel(); ++i) EXPECT_EQ(doubled[i], 2.0 * t[i]);
}

TEST(TensorTest, MapChannelSlicesRejectsShapeChange) {
  std::mt19937_64 gen(2);
  const Tensor t = oracle::random_tensor({1, 2, 3, 5}, gen);
  auto transpose = [](const Grid& g) {
    Grid out = Grid::zeros(g.w, g.h);
    for (std::size_t y = 0; y < g.h; ++y)
      for (std::size_t x = 0; x < g.w; ++x) out(x, y) = g(y, x);
    return out;
  };
  EXPECT_THROW(map_channel_slices(t, transpose), ShapeError);
}

TEST(TensorTest, MapChannelSlicesIgnoresThreadCount) {
  std::mt19937_64 gen(3);
  const Tensor t = oracle::random_tensor({3, 4, 5, 5}, gen);
  auto fn = [](const Grid& g) {
    Grid out = g;
    for (double& x : out.v) x = std::sin(x) * 3.0;
    return out;
  };
  set_thread_count(1);
  const Tensor one = map_channel_slices(t, fn);
  set_thread_count(4);
  const Tensor four = map_channel_slices(t, fn);
  set_thread_count(0);
  EXPECT_EQ(one, four);
}

TEST(TensorTest, Reductions) {
  const Tensor five = Tensor::full({1, 1, 3, 4}, 5.0);
  EXPECT_EQ(mean(five, kAxisH | kAxisW)[0], 5.0);
  EXPECT_EQ(var(five, kAxisH | kAxisW)[0], 0.0);
  const Tensor t = Tensor::from_data({1, 1, 2, 2}, {1.0, 3.0, 5.0, 7.0});
  const Tensor m = mean(t, kAxisN | kAxisH | kAxisW);
  EXPECT_EQ(m.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(m[0], 4.0);
  EXPECT_EQ(var(t, kAxisN | kAxisH | kAxisW)[0], 5.0);
  EXPECT_EQ(sum(t, kAxisH)[0], 6.0);
  EXPECT_EQ(sum(t, kAxisH)[1], 10.0);
}

TEST(TensorTest, ElementwiseAlgebra) {
  std::mt19937_64 gen(4);
  const Shape s{2, 3, 4, 5};
  const Tensor a = oracle::random_tensor(s, gen);
  const Tensor b = oracle::random_tensor(s, gen);
  const Tensor c = oracle::random_tensor(s, gen);
  EXPECT_EQ(a + b, b + a);
  EXPECT_EQ(a * b, b * a);
  const Tensor l = (a + b) + c;
  const Tensor r = a + (b + c);
  const Tensor lm = (a * b) * c;
  const Tensor rm = a * (b * c);
  for (std::size_t i = 0; i < l.numel(); ++i) {
    EXPECT_LE(std::abs(l[i] - r[i]), 1e-12 * std::max(1.0, std::abs(l[i])));
    EXPECT_LE(std::abs(lm[i] - rm[i]), 1e-12 * std::max(1.0, std::abs(lm[i])));
  }
  EXPECT_EQ(a - a, Tensor::zeros(s));
  EXPECT_THROW(a + Tensor::zeros({1, 3, 4, 5}), ShapeError);
}

TEST(TensorTest, DivisionByExactZeroIsDomainError) {
  const Tensor a = Tensor::full({1, 1, 1, 2}, 1.0);
  const Tensor b = Tensor::from_data({1, 1, 1, 2}, {2.0, 0.0});
  EXPECT_THROW(a / b, DomainError);
}

TEST(TensorTest, SubtractingTheMeanLeavesZeroMean) {
  std::mt19937_64 gen(5);
  const Tensor t = oracle::random_tensor({4, 3, 6, 6}, gen, 2.0, 7.0);
  const Tensor m = mean(t, kAxisN | kAxisH | kAxisW);
  const Tensor centered = add_per_channel(t, std::vector<double>{-m[0], -m[1], -m[2]});
  const Tensor after = mean(centered, kAxisN | kAxisH | kAxisW);
  for (double x : after.data()) EXPECT_LE(std::abs(x), 1e-12);
}

TEST(TensorTest, PerChannelBroadcast) {
  const Tensor t = Tensor::full({2, 2, 1, 1}, 3.0);
  const Tensor out = mul_per_channel(t, std::vector<double>{2.0, -1.0});
  EXPECT_EQ(out.at(1, 0, 0, 0), 6.0);
  EXPECT_EQ(out.at(1, 1, 0, 0), -3.0);
  EXPECT_THROW(add_per_channel(t, std::vector<double>{1.0}), ShapeError);
}

TEST(TensorIoTest, EncodeDecodeRoundTrip) {
  std::mt19937_64 gen(6);
  const Tensor t = oracle::random_tensor({2, 3, 4, 5}, gen);
  const std::vector<char> bytes = encode_tensor(t);
  ASSERT_EQ(bytes.size(), 8u + 32u + 8u * t.numel());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "FNTENSR1");
  // First dim, little-endian.
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[9], 0);
  EXPECT_EQ(decode_tensor(bytes, "mem"), t);
}

TEST(TensorIoTest, CorruptInputIsIoError) {
  const Tensor t = Tensor::full({1, 1, 2, 2}, 1.5);
  std::vector<char> bytes = encode_tensor(t);
  std::vector<char> bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_tensor(bad_magic, "mem"), IoError);
  std::vector<char> truncated(bytes.begin(), bytes.end() - 3);
  EXPECT_THROW(decode_tensor(truncated, "mem"), IoError);
  std::vector<char> trailing = bytes;
  trailing.push_back('\0');
  EXPECT_THROW(decode_tensor(trailing, "mem"), IoError);
}

TEST(TensorIoTest, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "freqnorm_tensor_test";
  std::filesystem::create_directories(dir);
  std::mt19937_64 gen(7);
  const Tensor t = oracle::random_tensor({1, 2, 3, 3}, gen);
  write_tensor(dir / "t.fnt", t);
  EXPECT_EQ(read_tensor(dir / "t.fnt"), t);
  try {
    read_tensor(dir / "missing.fnt");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.fnt"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(KeyValueTest, ParseCommentsAndDuplicates) {
  const KeyValueFile kv = KeyValueFile::parse("a = 1\n# note\n\nb=x y # tail\n", "cfg");
  EXPECT_EQ(kv.require("a"), "1");
  EXPECT_EQ(kv.require("b"), "x y");
  EXPECT_EQ(kv.get_u64("missing", 9), 9u);
  EXPECT_THROW(kv.require("missing"), ConfigError);
  EXPECT_THROW(KeyValueFile::parse("a=1\na=2\n", "cfg"), ConfigError);
  EXPECT_THROW(KeyValueFile::parse("a=1\nb=abc\n", "cfg").require_double("b"), ConfigError);
}

TEST(KeyValueTest, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125}) {
    EXPECT_EQ(parse_double(format_double(v), "v"), v);
  }
}

}  // namespace
}  // namespace freqnorm
