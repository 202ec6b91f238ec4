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

#include "freqnorm/spectral.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "freqnorm/errors.h"

namespace freqnorm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// cos/sin of sign*2*pi*k/n for k in [0, n).
struct Roots {
  std::vector<double> c;
  std::vector<double> s;
};

Roots unit_roots(std::size_t n, int sign) {
  Roots r{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double a = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    r.c[k] = std::cos(a);
    r.s[k] = sign * std::sin(a);
  }
  return r;
}

// Power-of-two tables, built once per thread. Same bits as unit_roots.
const Roots& cached_roots(std::size_t n, int sign) {
  thread_local std::map<std::pair<std::size_t, int>, Roots> cache;
  auto it = cache.find({n, sign});
  if (it == cache.end()) it = cache.emplace(std::make_pair(n, sign), unit_roots(n, sign)).first;
  return it->second;
}

// In-place iterative radix-2 transform of a strided complex sequence.
void fft_1d(double* re, double* im, std::size_t n, std::size_t stride,
            const Roots& roots) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i * stride], re[j * stride]);
      std::swap(im[i * stride], im[j * stride]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const double wr = roots.c[j * step];
        const double wi = roots.s[j * step];
        const std::size_t a = (base + j) * stride;
        const std::size_t b = (base + j + half) * stride;
        const double tr = re[b] * wr - im[b] * wi;
        const double ti = re[b] * wi + im[b] * wr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
      }
    }
  }
}

void require_valid(const ComplexGrid& g, const char* op) {
  if (g.h == 0 || g.w == 0 || g.re.size() != g.h * g.w ||
      g.im.size() != g.h * g.w) {
    throw ShapeError(std::string(op) + ": malformed complex grid");
  }
}

void require_valid(const Grid& g, const char* op) {
  if (g.h == 0 || g.w == 0 || g.v.size() != g.h * g.w) {
    throw ShapeError(std::string(op) + ": malformed grid");
  }
}

ComplexGrid scaled(ComplexGrid g, double s) {
  for (double& x : g.re) x *= s;
  for (double& x : g.im) x *= s;
  return g;
}

Grid real_part_checked(ComplexGrid g, const char* op) {
  double residue = 0.0;
  for (double x : g.im) residue = std::max(residue, std::abs(x));
  if (!(residue <= kNonRealTolerance)) {
    throw NonRealSignalError(std::string(op) + ": imaginary residue " +
                             std::to_string(residue) + " exceeds tolerance");
  }
  return Grid{g.h, g.w, std::move(g.re)};
}


// Forward (sign +1) transform of a real grid with power-of-two sides, scaled
// by `scale`. Rows are transformed two at a time as one complex sequence and
// only columns 0..w/2 are transformed; the rest follow from conjugate
// symmetry.
ComplexGrid real_dft_fast(const Grid& f, double scale) {
  const std::size_t h = f.h, w = f.w;
  ComplexGrid out = ComplexGrid::zeros(h, w);
  const Roots& rw = cached_roots(w, +1);
  std::vector<double> zr(w), zi(w);
  for (std::size_t y = 0; y < h; y += 2) {
    const bool pair = y + 1 < h;
    std::copy_n(f.v.data() + y * w, w, zr.data());
    if (pair) {
      std::copy_n(f.v.data() + (y + 1) * w, w, zi.data());
    } else {
      std::fill(zi.begin(), zi.end(), 0.0);
    }
    if (w > 1) fft_1d(zr.data(), zi.data(), w, 1, rw);
    double* ar = out.re.data() + y * w;
    double* ai = out.im.data() + y * w;
    if (!pair) {
      std::copy_n(zr.data(), w, ar);
      std::copy_n(zi.data(), w, ai);
      continue;
    }
    double* br = out.re.data() + (y + 1) * w;
    double* bi = out.im.data() + (y + 1) * w;
    for (std::size_t k = 0; k < w; ++k) {
      const std::size_t m = (w - k) % w;
      // A = (Z[k] + conj Z[m]) / 2,  B = (Z[k] - conj Z[m]) / 2i.
      ar[k] = 0.5 * (zr[k] + zr[m]);
      ai[k] = 0.5 * (zi[k] - zi[m]);
      br[k] = 0.5 * (zi[k] + zi[m]);
      bi[k] = -0.5 * (zr[k] - zr[m]);
    }
  }
  const std::size_t half = w / 2;
  if (h > 1) {
    const Roots& rh = cached_roots(h, +1);
    for (std::size_t u = 0; u <= half && u < w; ++u) {
      fft_1d(out.re.data() + u, out.im.data() + u, h, w, rh);
    }
  }
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u <= half && u < w; ++u) {
      out.re[v * w + u] *= scale;
      out.im[v * w + u] *= scale;
    }
  }
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = half + 1; u < w; ++u) {
      const std::size_t src = ((h - v) % h) * w + (w - u);
      out.re[v * w + u] = out.re[src];
      out.im[v * w + u] = -out.im[src];
    }
  }
  return out;
}

}  // namespace

ComplexGrid ComplexGrid::zeros(std::size_t h, std::size_t w) {
  return ComplexGrid{h, w, std::vector<double>(h * w, 0.0),
                     std::vector<double>(h * w, 0.0)};
}

ComplexGrid ComplexGrid::from_real(const Grid& g) {
  return ComplexGrid{g.h, g.w, g.v, std::vector<double>(g.v.size(), 0.0)};
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

ComplexGrid dft_naive(const ComplexGrid& in, int sign) {
  require_valid(in, "dft_naive");
  const std::size_t h = in.h, w = in.w;
  const Roots rw = unit_roots(w, sign);
  const Roots rh = unit_roots(h, sign);
  ComplexGrid out = ComplexGrid::zeros(h, w);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      double acc_re = 0.0, acc_im = 0.0;
      for (std::size_t y = 0; y < h; ++y) {
        const std::size_t ky = (v * y) % h;
        const double cy = rh.c[ky], sy = rh.s[ky];
        for (std::size_t x = 0; x < w; ++x) {
          const std::size_t kx = (u * x) % w;
          // exp(i(a+b)) from the two axis roots.
          const double er = rw.c[kx] * cy - rw.s[kx] * sy;
          const double ei = rw.s[kx] * cy + rw.c[kx] * sy;
          const double fr = in.re[y * w + x], fi = in.im[y * w + x];
          acc_re += fr * er - fi * ei;
          acc_im += fr * ei + fi * er;
        }
      }
      out.re[v * w + u] = acc_re;
      out.im[v * w + u] = acc_im;
    }
  }
  return out;
}

ComplexGrid dft_fast(const ComplexGrid& in, int sign) {
  require_valid(in, "dft_fast");
  if (!is_power_of_two(in.h) || !is_power_of_two(in.w)) {
    return dft_naive(in, sign);
  }
  ComplexGrid out = in;
  const std::size_t h = in.h, w = in.w;
  if (w > 1) {
    const Roots& rw = cached_roots(w, sign);
    for (std::size_t y = 0; y < h; ++y) {
      fft_1d(out.re.data() + y * w, out.im.data() + y * w, w, 1, rw);
    }
  }
  if (h > 1) {
    const Roots& rh = cached_roots(h, sign);
    for (std::size_t x = 0; x < w; ++x) {
      fft_1d(out.re.data() + x, out.im.data() + x, h, w, rh);
    }
  }
  return out;
}

ComplexGrid dft2(const Grid& f) {
  require_valid(f, "dft2");
  return scaled(dft_naive(ComplexGrid::from_real(f), +1),
                1.0 / static_cast<double>(f.h * f.w));
}

Grid idft2(const ComplexGrid& F) {
  return real_part_checked(dft_naive(F, -1), "idft2");
}

ComplexGrid fft2_fast(const Grid& f) {
  require_valid(f, "fft2_fast");
  if (is_power_of_two(f.h) && is_power_of_two(f.w)) {
    return real_dft_fast(f, 1.0 / static_cast<double>(f.h * f.w));
  }
  return scaled(dft_fast(ComplexGrid::from_real(f), +1),
                1.0 / static_cast<double>(f.h * f.w));
}

Grid ifft2_fast(const ComplexGrid& F) {
  return real_part_checked(dft_fast(F, -1), "ifft2_fast");
}

SpectralPair decompose(const ComplexGrid& F) {
  require_valid(F, "decompose");
  SpectralPair p{F.h, F.w, std::vector<double>(F.size()),
                 std::vector<double>(F.size())};
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double re = F.re[i], im = F.im[i];
    const double a = std::sqrt(re * re + im * im);
    p.amplitude[i] = a;
    if (a == 0.0) {
      p.phase[i] = 0.0;
    } else {
      const double rho = std::atan2(im, re);
      // atan2 yields -pi for (negative, -0.0); fold it onto +pi.
      p.phase[i] = rho == -std::numbers::pi ? std::numbers::pi : rho;
    }
  }
  return p;
}

ComplexGrid compose(const SpectralPair& p) {
  if (p.amplitude.size() != p.h * p.w || p.phase.size() != p.h * p.w ||
      p.h == 0 || p.w == 0) {
    throw ShapeError("compose: malformed spectral pair");
  }
  ComplexGrid F = ComplexGrid::zeros(p.h, p.w);
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double a = p.amplitude[i];
    if (a < 0.0) {
      throw DomainError("compose: negative amplitude " + std::to_string(a));
    }
    F.re[i] = a * std::cos(p.phase[i]);
    F.im[i] = a * std::sin(p.phase[i]);
  }
  return F;
}

double wrap_angle(double a) {
  const double r = std::remainder(a, kTwoPi);
  return r == -std::numbers::pi ? std::numbers::pi : r;
}

Grid dft2_backward(const ComplexGrid& grad_spectrum) {
  require_valid(grad_spectrum, "dft2_backward");
  const ComplexGrid t = dft_fast(grad_spectrum, -1);
  const double inv = 1.0 / static_cast<double>(t.size());
  Grid g{t.h, t.w, t.re};
  for (double& x : g.v) x *= inv;
  return g;
}

ComplexGrid idft2_backward(const Grid& grad_signal) {
  require_valid(grad_signal, "idft2_backward");
  if (is_power_of_two(grad_signal.h) && is_power_of_two(grad_signal.w)) {
    return real_dft_fast(grad_signal, 1.0);
  }
  return dft_fast(ComplexGrid::from_real(grad_signal), +1);
}

ComplexGrid decompose_backward(const ComplexGrid& F, const SpectralPair& pair,
                               std::span<const double> grad_amplitude,
                               std::span<const double> grad_phase) {
  require_valid(F, "decompose_backward");
  const std::size_t n = F.size();
  if (pair.amplitude.size() != n ||
      (!grad_amplitude.empty() && grad_amplitude.size() != n) ||
      (!grad_phase.empty() && grad_phase.size() != n)) {
    throw ShapeError("decompose_backward: size mismatch");
  }
  ComplexGrid g = ComplexGrid::zeros(F.h, F.w);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pair.amplitude[i];
    if (a <= kGradAmplitudeFloor) continue;
    const double re = F.re[i], im = F.im[i];
    const double ga = grad_amplitude.empty() ? 0.0 : grad_amplitude[i];
    const double gp = grad_phase.empty() ? 0.0 : grad_phase[i];
    const double a2 = a * a;
    g.re[i] = ga * re / a - gp * im / a2;
    g.im[i] = ga * im / a + gp * re / a2;
  }
  return g;
}

void compose_backward(const SpectralPair& pair, const ComplexGrid& grad_spectrum,
                      std::vector<double>& grad_amplitude,
                      std::vector<double>& grad_phase) {
  require_valid(grad_spectrum, "compose_backward");
  const std::size_t n = grad_spectrum.size();
  if (pair.amplitude.size() != n || pair.phase.size() != n) {
    throw ShapeError("compose_backward: size mismatch");
  }
  grad_amplitude.assign(n, 0.0);
  grad_phase.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(pair.phase[i]);
    const double s = std::sin(pair.phase[i]);
    const double gr = grad_spectrum.re[i], gi = grad_spectrum.im[i];
    grad_amplitude[i] = gr * c + gi * s;
    grad_phase[i] = pair.amplitude[i] * (gi * c - gr * s);
  }
}

}  // namespace freqnorm
