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

#include "freqtraj/freq_moe.hpp"

#include <stdexcept>
#include <string>

namespace freqtraj
{

std::vector<ExpertMask> build_masks(std::size_t bins, std::size_t experts)
{
  if (experts == 0 || experts > bins) {
    throw std::invalid_argument(
      "build_masks: need 1 <= experts <= bins, got experts=" + std::to_string(experts) +
      " bins=" + std::to_string(bins));
  }
  std::vector<ExpertMask> masks;
  const std::size_t base = bins / experts;
  const std::size_t extra = bins % experts;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < experts; ++i) {
    const std::size_t width = base + (i < extra ? 1 : 0);
    masks.push_back({i, lo, lo + width});
    lo += width;
  }
  return masks;
}

Tensor mask_matrix(const std::vector<ExpertMask> & masks, std::size_t bins)
{
  std::vector<double> values(masks.size() * bins, 0.0);
  for (const auto & m : masks) {
    for (std::size_t f = m.lo; f < m.hi; ++f) values[m.index * bins + f] = 1.0;
  }
  return Tensor::from({masks.size(), bins}, std::move(values));
}

ComplexTensor apply_mask(const ComplexTensor & spectrum, const ExpertMask & mask)
{
  const Shape & s = spectrum.shape();
  if (s.size() != 3) throw ShapeError("apply_mask: expected [B,F,C], got " + to_string(s));
  std::vector<double> values(s[1] * s[2], 0.0);
  for (std::size_t f = 0; f < s[1]; ++f) {
    if (!mask.contains(f)) continue;
    for (std::size_t c = 0; c < s[2]; ++c) values[f * s[2] + c] = 1.0;
  }
  Tensor m = Tensor::from({s[1], s[2]}, std::move(values));
  return {spectrum.re * m, spectrum.im * m};
}

FrequencyMoe FrequencyMoe::create(
  ParameterStore & store, const std::string & name, std::size_t length, std::size_t experts)
{
  FrequencyMoe moe;
  moe.length = length;
  moe.experts = experts;
  moe.masks = build_masks(moe.bins(), experts);
  moe.gate = Linear::zeros(store, name + ".gate", moe.bins(), experts);
  return moe;
}

Tensor FrequencyMoe::gate_weights(const ComplexTensor & spectrum) const
{
  Tensor pooled = mean(magnitude(spectrum), 2);  // [B, F]
  return softmax(gate(pooled));
}

Tensor FrequencyMoe::operator()(const Tensor & x) const
{
  if (x.rank() != 3 || x.dim(1) != length) {
    throw ShapeError("FrequencyMoe: expected [B," + std::to_string(length) + ",C], got " + to_string(x.shape()));
  }
  const std::size_t batch = x.dim(0);
  const std::size_t channels = x.dim(2);
  const std::size_t padded = padded_length();

  ComplexTensor spectrum = rfft(pad_to_power_of_two(x));
  Tensor weights = gate_weights(spectrum);  // [B, N_e]
  // sum_i W_i (M_i . E) == E . (W M) because the masks partition the bins.
  Tensor bin_scale = matmul(weights, mask_matrix(masks, bins()));  // [B, F]
  bin_scale = expand(reshape(bin_scale, {batch, bins(), 1}), {batch, bins(), channels});
  Tensor filtered = irfft({spectrum.re * bin_scale, spectrum.im * bin_scale}, padded);
  return padded == length ? filtered : slice(filtered, 1, 0, length);
}

}  // namespace freqtraj
