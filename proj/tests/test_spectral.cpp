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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "freqtraj/grad_check.hpp"
#include "freqtraj/spectral.hpp"
#include "support.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace freqtraj;
using freqtraj::testing::random_tensor;

namespace
{

// O(T^2) half-spectrum of channel c of x[1, T, C].
std::vector<std::complex<double>> naive_rdft(const Tensor & x, std::size_t c)
{
  const std::size_t t = x.dim(1);
  std::vector<std::complex<double>> out(t / 2 + 1);
  for (std::size_t f = 0; f < out.size(); ++f) {
    for (std::size_t n = 0; n < t; ++n) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(f * n) / static_cast<double>(t);
      out[f] += x.at({0, n, c}) * std::complex<double>(std::cos(angle), std::sin(angle));
    }
  }
  return out;
}

// Real inverse from a half spectrum by Hermitian extension.
std::vector<double> naive_irdft(const std::vector<std::complex<double>> & half, std::size_t t)
{
  std::vector<std::complex<double>> full(t);
  for (std::size_t f = 0; f < t; ++f) full[f] = f <= t / 2 ? half[f] : std::conj(half[t - f]);
  full[0].imag(0.0);
  full[t / 2].imag(0.0);
  std::vector<double> out(t);
  for (std::size_t n = 0; n < t; ++n) {
    std::complex<double> s;
    for (std::size_t f = 0; f < t; ++f) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(f * n) / static_cast<double>(t);
      s += full[f] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[n] = s.real() / static_cast<double>(t);
  }
  return out;
}

}  // namespace

TEST_CASE("constant signal has a DC-only spectrum")
{
  ComplexTensor s = rfft(Tensor::from({1, 4, 1}, {1, 1, 1, 1}));
  REQUIRE(s.shape() == Shape{1, 3, 1});
  CHECK(s.re[0] == doctest::Approx(4.0));
  for (std::size_t f = 0; f < 3; ++f) CHECK(std::abs(s.im[f]) < 1e-15);
  CHECK(std::abs(s.re[1]) < 1e-15);
  CHECK(std::abs(s.re[2]) < 1e-15);
}

TEST_CASE("unit impulse has a flat spectrum")
{
  ComplexTensor s = rfft(Tensor::from({1, 4, 1}, {1, 0, 0, 0}));
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(s.re[f] == doctest::Approx(1.0));
    CHECK(std::abs(s.im[f]) < 1e-15);
  }
}

TEST_CASE("rfft matches a naive DFT and round-trips for every power of two up to 64")
{
  std::mt19937_64 rng(0);
  for (std::size_t t = 2; t <= 64; t *= 2) {
    CAPTURE(t);
    Tensor x = random_tensor({1, t, 3}, rng);
    ComplexTensor s = rfft(x);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto ref = naive_rdft(x, c);
      for (std::size_t f = 0; f < ref.size(); ++f) {
        CHECK(std::abs(s.re.at({0, f, c}) - ref[f].real()) <= 1e-9);
        CHECK(std::abs(s.im.at({0, f, c}) - ref[f].imag()) <= 1e-9);
      }
    }
    CHECK(freqtraj::testing::max_abs_diff(irfft(s, t), x) <= 1e-9);
  }
}

TEST_CASE("irfft of a DC spectrum is constant")
{
  const double c = 2.5;
  const std::size_t t = 8;
  Tensor re = Tensor::zeros({1, t / 2 + 1, 1});
  re.mutable_data()[0] = c * t;
  Tensor x = irfft({re, Tensor::zeros({1, t / 2 + 1, 1})}, t);
  for (double v : x.data()) CHECK(v == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("band-limited spectrum inverts like a naive inverse DFT")
{
  std::mt19937_64 rng(9);
  const std::size_t t = 16;
  Tensor re = random_tensor({1, t / 2 + 1, 1}, rng);
  Tensor im = random_tensor({1, t / 2 + 1, 1}, rng);
  for (std::size_t f = 5; f <= t / 2; ++f) {
    re.mutable_data()[f] = 0.0;
    im.mutable_data()[f] = 0.0;
  }
  std::vector<std::complex<double>> half(t / 2 + 1);
  for (std::size_t f = 0; f < half.size(); ++f) half[f] = {re[f], im[f]};
  const auto ref = naive_irdft(half, t);
  Tensor x = irfft({re, im}, t);
  for (std::size_t n = 0; n < t; ++n) CHECK(std::abs(x[n] - ref[n]) <= 1e-9);
}

TEST_CASE("non power-of-two lengths are rejected by the kernel and padded on request")
{
  CHECK_THROWS(rfft(Tensor::zeros({1, 6, 1})));
  Tensor x = Tensor::from({1, 5, 1}, {1, 2, 3, 4, 5});
  Tensor p = pad_to_power_of_two(x);
  REQUIRE(p.dim(1) == 8);
  CHECK(p[4] == 5.0);
  CHECK(p[7] == 5.0);
}

TEST_CASE("spectral ops pass finite-difference checks")
{
  std::mt19937_64 rng(4);
  Tensor x = random_tensor({2, 8, 2}, rng, 1.0, true);
  Tensor w = random_tensor({2, 5, 2}, rng);
  Tensor v = random_tensor({2, 8, 2}, rng);
  CHECK(grad_check(
          [&](const Tensor & in) {
            ComplexTensor s = rfft(in);
            return sum(s.re * w) + sum(s.im * s.im) + sum(magnitude(s) * w);
          },
          x) <= 1e-4);
  Tensor re = random_tensor({2, 5, 2}, rng, 1.0, true);
  Tensor im = random_tensor({2, 5, 2}, rng, 1.0, true);
  std::vector<Tensor> inputs{re, im};
  CHECK(grad_check([&] { return sum(irfft({re, im}, 8) * v); }, std::span<Tensor>(inputs)) <= 1e-4);
}
