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

#ifndef FREQTRAJ__SPECTRAL_HPP_
#define FREQTRAJ__SPECTRAL_HPP_

#include "freqtraj/tensor.hpp"

#include <complex>
#include <span>

namespace freqtraj
{

/// Complex array stored as two real tensors of identical shape, so the tape stays real.
struct ComplexTensor
{
  Tensor re;
  Tensor im;

  const Shape & shape() const { return re.shape(); }
};

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n)
{
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Iterative radix-2 transform, unnormalized in both directions.
/// Forward uses exp(-2 pi i k t / n); `inverse` flips the sign.
void fft_in_place(std::span<std::complex<double>> values, bool inverse = false);

/// Half-spectrum along axis 1 of x[B, T, C]; T must be a power of two. Output [B, T/2+1, C].
ComplexTensor rfft(const Tensor & x);

/// Inverse of `rfft`: s[B, length/2+1, C] -> [B, length, C]. Imaginary parts of the DC and
/// Nyquist bins are ignored.
Tensor irfft(const ComplexTensor & s, std::size_t length);

/// Right-pads axis 1 of x[B, T, C] with copies of the last step up to a power of two.
Tensor pad_to_power_of_two(const Tensor & x);

/// sqrt(re^2 + im^2 + eps), smooth at the origin.
Tensor magnitude(const ComplexTensor & s, double eps = 1e-12);

}  // namespace freqtraj

#endif  // FREQTRAJ__SPECTRAL_HPP_
