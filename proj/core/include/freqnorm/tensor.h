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

#ifndef FREQNORM_TENSOR_H_
#define FREQNORM_TENSOR_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace freqnorm {

/// NCHW extents of a dense tensor.
struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t numel() const { return n * c * h * w; }
  std::size_t plane() const { return h * w; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Throws ShapeError when any dim is zero or the element count overflows.
void validate_shape(const Shape& shape);

/// Dense row-major NCHW array of doubles.
///
/// A default-constructed tensor is empty (all dims zero) and only useful as
/// a placeholder; every factory validates its shape.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(const Shape& shape);
  static Tensor full(const Shape& shape, double value);
  static Tensor from_data(const Shape& shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t y,
                    std::size_t x) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  double at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[index(n, c, y, x)];
  }
  double& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return data_[index(n, c, y, x)];
  }

  /// The h*w plane of one (batch, channel) pair.
  std::span<const double> plane(std::size_t n, std::size_t c) const;
  std::span<double> plane(std::size_t n, std::size_t c);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Tensor(const Shape& shape, std::vector<double> data)
      : shape_(shape), data_(std::move(data)) {}

  Shape shape_;
  std::vector<double> data_;
};

/// Real h×w grid, one channel slice of a Tensor. Element (y, x) lives at
/// y*w + x.
struct Grid {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> v;

  static Grid zeros(std::size_t h, std::size_t w);
  double& operator()(std::size_t y, std::size_t x) { return v[y * w + x]; }
  double operator()(std::size_t y, std::size_t x) const { return v[y * w + x]; }
};

Grid slice(const Tensor& t, std::size_t n, std::size_t c);
void set_slice(Tensor& t, std::size_t n, std::size_t c, const Grid& g);

using SliceFn = std::function<Grid(const Grid&)>;

/// Applies fn to every (n, c) plane. The output of fn must keep the plane
/// shape. Slices may run in parallel; results do not depend on the thread
/// count.
Tensor map_channel_slices(const Tensor& t, const SliceFn& fn);

enum Axis : unsigned {
  kAxisN = 1u << 0,
  kAxisC = 1u << 1,
  kAxisH = 1u << 2,
  kAxisW = 1u << 3,
};
using Axes = unsigned;

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// Elementwise division; an exactly-zero divisor is a DomainError.
Tensor div(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& a, double s);
Tensor scale(const Tensor& a, double s);

/// Broadcast a per-channel vector (length c) across n, h, w.
Tensor add_per_channel(const Tensor& a, std::span<const double> v);
Tensor mul_per_channel(const Tensor& a, std::span<const double> v);

/// Reductions keep reduced dims with extent 1. Summation order is fixed
/// (row-major over the reduced elements) so results are reproducible.
Tensor sum(const Tensor& a, Axes axes);
Tensor mean(const Tensor& a, Axes axes);
/// Biased (divide-by-count) variance.
Tensor var(const Tensor& a, Axes axes);

double sum_all(const Tensor& a);
double max_abs(const Tensor& a);
double max_abs_diff(const Tensor& a, const Tensor& b);
bool all_finite(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

}  // namespace freqnorm

#endif  // FREQNORM_TENSOR_H_
