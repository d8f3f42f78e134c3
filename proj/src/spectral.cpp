// Copyright 2026 The freqtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "freqtraj/spectral.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace freqtraj
{

using cd = std::complex<double>;

void fft_in_place(std::span<cd> values, bool inverse)
{
  const std::size_t n = values.size();
  if (!is_power_of_two(n)) {
    throw ShapeError("fft: length " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(values[i], values[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const cd w = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len));
      for (std::size_t start = 0; start < n; start += len) {
        const cd u = values[start + k];
        const cd v = values[start + k + half] * w;
        values[start + k] = u + v;
        values[start + k + half] = u - v;
      }
    }
  }
}

namespace
{

struct Dims
{
  std::size_t batch;
  std::size_t length;
  std::size_t channels;
};

Dims time_dims(const Shape & s, const char * op)
{
  if (s.size() != 3) throw ShapeError(std::string(op) + ": expected [B,T,C], got " + to_string(s));
  return {s[0], s[1], s[2]};
}

// Real half spectrum of every (b, c) series in x[B, T, C].
void forward_half_spectrum(
  std::span<const double> x, Dims d, std::vector<double> & re, std::vector<double> & im)
{
  const std::size_t bins = d.length / 2 + 1;
  re.assign(d.batch * bins * d.channels, 0.0);
  im.assign(d.batch * bins * d.channels, 0.0);
  std::vector<cd> buf(d.length);
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t c = 0; c < d.channels; ++c) {
      for (std::size_t t = 0; t < d.length; ++t) buf[t] = x[(b * d.length + t) * d.channels + c];
      fft_in_place(buf);
      for (std::size_t f = 0; f < bins; ++f) {
        re[(b * bins + f) * d.channels + c] = buf[f].real();
        im[(b * bins + f) * d.channels + c] = buf[f].imag();
      }
    }
  }
}

// Adjoint of `forward_half_spectrum` for one output part; `imag` selects which.
void accumulate_half_spectrum_adjoint(
  const std::vector<double> & g, Dims d, bool imag, std::vector<double> & gx)
{
  const std::size_t bins = d.length / 2 + 1;
  std::vector<cd> buf(d.length);
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t c = 0; c < d.channels; ++c) {
      std::fill(buf.begin(), buf.end(), cd{});
      for (std::size_t f = 0; f < bins; ++f) {
        const double v = g[(b * bins + f) * d.channels + c];
        buf[f] = imag ? cd{0.0, v} : cd{v, 0.0};
      }
      fft_in_place(buf, true);
      for (std::size_t t = 0; t < d.length; ++t) gx[(b * d.length + t) * d.channels + c] += buf[t].real();
    }
  }
}

}  // namespace

ComplexTensor rfft(const Tensor & x)
{
  const Dims d = time_dims(x.shape(), "rfft");
  if (!is_power_of_two(d.length)) {
    throw ShapeError("rfft: time length " + std::to_string(d.length) + " is not a power of two");
  }
  std::vector<double> re;
  std::vector<double> im;
  forward_half_spectrum(x.data(), d, re, im);
  const Shape out{d.batch, d.length / 2 + 1, d.channels};
  auto part = [&](std::vector<double> values, bool imag) {
    return Tensor::make_op(out, std::move(values), {x}, [d, imag](detail::Node & o) {
      accumulate_half_spectrum_adjoint(o.grad, d, imag, o.parents[0]->grad_buffer());
    });
  };
  return {part(std::move(re), false), part(std::move(im), true)};
}

Tensor irfft(const ComplexTensor & s, std::size_t length)
{
  const Dims sd = time_dims(s.shape(), "irfft");
  if (s.im.shape() != s.re.shape()) {
    throw ShapeError("irfft: re " + to_string(s.re.shape()) + " vs im " + to_string(s.im.shape()));
  }
  if (!is_power_of_two(length) || sd.length != length / 2 + 1) {
    throw ShapeError("irfft: " + std::to_string(sd.length) + " bins do not match length " + std::to_string(length));
  }
  const Dims d{sd.batch, length, sd.channels};
  const std::size_t bins = sd.length;
  const std::size_t nyquist = length / 2;
  auto re = s.re.data();
  auto im = s.im.data();
  std::vector<double> out(d.batch * length * d.channels);
  std::vector<cd> buf(length);
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t c = 0; c < d.channels; ++c) {
      for (std::size_t f = 0; f < bins; ++f) {
        const std::size_t at = (b * bins + f) * d.channels + c;
        const bool real_only = f == 0 || f == nyquist;
        buf[f] = cd{re[at], real_only ? 0.0 : im[at]};
        if (f != 0 && f != nyquist) buf[length - f] = std::conj(buf[f]);
      }
      fft_in_place(buf, true);
      for (std::size_t t = 0; t < length; ++t) {
        out[(b * length + t) * d.channels + c] = buf[t].real() / static_cast<double>(length);
      }
    }
  }
  return Tensor::make_op({d.batch, length, d.channels}, std::move(out), {s.re, s.im}, [d, bins, nyquist](detail::Node & o) {
    std::vector<double> gre;
    std::vector<double> gim;
    forward_half_spectrum(o.grad, d, gre, gim);
    const double inv = 1.0 / static_cast<double>(d.length);
    for (std::size_t i = 0; i < gre.size(); ++i) {
      const std::size_t f = (i / d.channels) % bins;
      const bool edge = f == 0 || f == nyquist;
      const double weight = (edge ? 1.0 : 2.0) * inv;
      gre[i] *= weight;
      gim[i] = edge ? 0.0 : gim[i] * weight;
    }
    detail::Node & pre = *o.parents[0];
    detail::Node & pim = *o.parents[1];
    if (pre.requires_grad) {
      auto & g = pre.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gre[i];
    }
    if (pim.requires_grad) {
      auto & g = pim.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gim[i];
    }
  });
}

Tensor pad_to_power_of_two(const Tensor & x)
{
  const Dims d = time_dims(x.shape(), "pad_to_power_of_two");
  const std::size_t target = next_power_of_two(d.length);
  if (target == d.length) return x;
  Tensor last = slice(x, 1, d.length - 1, d.length);
  return concat({x, expand(last, {d.batch, target - d.length, d.channels})}, 1);
}

Tensor magnitude(const ComplexTensor & s, double eps)
{
  return sqrt(add_scalar(square(s.re) + square(s.im), eps));
}

}  // namespace freqtraj
