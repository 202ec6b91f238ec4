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

#include "freqnorm/tensor.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "freqnorm/errors.h"
#include "freqnorm/parallel.h"

namespace freqnorm {

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + ")";
}

void validate_shape(const Shape& shape) {
  const std::array<std::size_t, 4> dims{shape.n, shape.c, shape.h, shape.w};
  // Cap at 2^48 elements; past that a vector<double> cannot be allocated anyway.
  constexpr std::size_t kMaxElements = std::size_t{1} << 48;
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw ShapeError("zero dimension in shape " + shape.str());
    if (d > kMaxElements / total) {
      throw ShapeError("shape " + shape.str() + " overflows element count");
    }
    total *= d;
  }
}

Tensor Tensor::zeros(const Shape& shape) { return full(shape, 0.0); }

Tensor Tensor::full(const Shape& shape, double value) {
  validate_shape(shape);
  return Tensor(shape, std::vector<double>(shape.numel(), value));
}

Tensor Tensor::from_data(const Shape& shape, std::vector<double> data) {
  validate_shape(shape);
  if (data.size() != shape.numel()) {
    throw ShapeError("data length " + std::to_string(data.size()) +
                     " does not match shape " + shape.str());
  }
  return Tensor(shape, std::move(data));
}

std::span<const double> Tensor::plane(std::size_t n, std::size_t c) const {
  return std::span<const double>(data_).subspan(index(n, c, 0, 0),
                                                shape_.plane());
}

std::span<double> Tensor::plane(std::size_t n, std::size_t c) {
  return std::span<double>(data_).subspan(index(n, c, 0, 0), shape_.plane());
}

Grid Grid::zeros(std::size_t h, std::size_t w) {
  return Grid{h, w, std::vector<double>(h * w, 0.0)};
}

Grid slice(const Tensor& t, std::size_t n, std::size_t c) {
  auto p = t.plane(n, c);
  return Grid{t.shape().h, t.shape().w, std::vector<double>(p.begin(), p.end())};
}

void set_slice(Tensor& t, std::size_t n, std::size_t c, const Grid& g) {
  if (g.h != t.shape().h || g.w != t.shape().w || g.v.size() != g.h * g.w) {
    throw ShapeError("slice " + std::to_string(g.h) + "x" +
                     std::to_string(g.w) + " does not fit plane of " +
                     t.shape().str());
  }
  std::copy(g.v.begin(), g.v.end(), t.plane(n, c).begin());
}

Tensor map_channel_slices(const Tensor& t, const SliceFn& fn) {
  Tensor out = Tensor::zeros(t.shape());
  const std::size_t channels = t.shape().c;
  parallel_for(t.shape().n * channels, [&](std::size_t i) {
    const std::size_t n = i / channels;
    const std::size_t c = i % channels;
    set_slice(out, n, c, fn(slice(t, n, c)));
  });
  return out;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape().str() +
                     " vs " + b.shape().str());
  }
}

template <typename F>
Tensor zip(const Tensor& a, const Tensor& b, const char* op, F f) {
  require_same_shape(a, b, op);
  Tensor out = Tensor::zeros(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

template <typename F>
Tensor map(const Tensor& a, F f) {
  Tensor out = Tensor::zeros(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = f(a[i]);
  return out;
}

Shape reduced_shape(const Shape& s, Axes axes) {
  return Shape{(axes & kAxisN) ? 1 : s.n, (axes & kAxisC) ? 1 : s.c,
               (axes & kAxisH) ? 1 : s.h, (axes & kAxisW) ? 1 : s.w};
}

std::size_t reduced_count(const Shape& s, Axes axes) {
  return s.numel() / reduced_shape(s, axes).numel();
}

void require_channel_vector(const Tensor& a, std::span<const double> v) {
  if (v.size() != a.shape().c) {
    throw ShapeError("per-channel vector of length " + std::to_string(v.size()) +
                     " for tensor " + a.shape().str());
  }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return zip(a, b, "sub", [](double x, double y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return zip(a, b, "mul", [](double x, double y) { return x * y; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "div");
  for (double d : b.data()) {
    if (d == 0.0) throw DomainError("div: exact zero divisor");
  }
  return zip(a, b, "div", [](double x, double y) { return x / y; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return map(a, [s](double x) { return x + s; });
}

Tensor scale(const Tensor& a, double s) {
  return map(a, [s](double x) { return x * s; });
}

Tensor add_per_channel(const Tensor& a, std::span<const double> v) {
  require_channel_vector(a, v);
  Tensor out = a;
  const Shape& s = a.shape();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (double& x : out.plane(n, c)) x += v[c];
    }
  }
  return out;
}

Tensor mul_per_channel(const Tensor& a, std::span<const double> v) {
  require_channel_vector(a, v);
  Tensor out = a;
  const Shape& s = a.shape();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      for (double& x : out.plane(n, c)) x *= v[c];
    }
  }
  return out;
}

Tensor sum(const Tensor& a, Axes axes) {
  const Shape& s = a.shape();
  Tensor out = Tensor::zeros(reduced_shape(s, axes));
  for (std::size_t n = 0; n < s.n; ++n) {
    const std::size_t on = (axes & kAxisN) ? 0 : n;
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t oc = (axes & kAxisC) ? 0 : c;
      for (std::size_t y = 0; y < s.h; ++y) {
        const std::size_t oy = (axes & kAxisH) ? 0 : y;
        for (std::size_t x = 0; x < s.w; ++x) {
          const std::size_t ox = (axes & kAxisW) ? 0 : x;
          out.at(on, oc, oy, ox) += a.at(n, c, y, x);
        }
      }
    }
  }
  return out;
}

Tensor mean(const Tensor& a, Axes axes) {
  Tensor out = sum(a, axes);
  const double count = static_cast<double>(reduced_count(a.shape(), axes));
  for (double& x : out.data()) x /= count;
  return out;
}

Tensor var(const Tensor& a, Axes axes) {
  const Shape& s = a.shape();
  const Tensor mu = mean(a, axes);
  Tensor out = Tensor::zeros(mu.shape());
  for (std::size_t n = 0; n < s.n; ++n) {
    const std::size_t on = (axes & kAxisN) ? 0 : n;
    for (std::size_t c = 0; c < s.c; ++c) {
      const std::size_t oc = (axes & kAxisC) ? 0 : c;
      for (std::size_t y = 0; y < s.h; ++y) {
        const std::size_t oy = (axes & kAxisH) ? 0 : y;
        for (std::size_t x = 0; x < s.w; ++x) {
          const std::size_t ox = (axes & kAxisW) ? 0 : x;
          const double d = a.at(n, c, y, x) - mu.at(on, oc, oy, ox);
          out.at(on, oc, oy, ox) += d * d;
        }
      }
    }
  }
  const double count = static_cast<double>(reduced_count(s, axes));
  for (double& x : out.data()) x /= count;
  return out;
}

double sum_all(const Tensor& a) {
  double total = 0.0;
  for (double x : a.data()) total += x;
  return total;
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double x : a.data()) {
    const double d = std::abs(x);
    if (!(d <= m)) m = d;  // lets NaN through
  }
  return m;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (!(d <= m)) m = d;
  }
  return m;
}

bool all_finite(const Tensor& a) {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace freqnorm
