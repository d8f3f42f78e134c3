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

#ifndef FREQTRAJ__FREQ_MOE_HPP_
#define FREQTRAJ__FREQ_MOE_HPP_

#include "freqtraj/nn.hpp"
#include "freqtraj/spectral.hpp"
#include "freqtraj/tensor.hpp"

#include <vector>

namespace freqtraj
{

/// Expert `index` owns the half-open bin interval [lo, hi).
struct ExpertMask
{
  std::size_t index;
  std::size_t lo;
  std::size_t hi;

  bool contains(std::size_t bin) const { return bin >= lo && bin < hi; }
};

/// Uniform contiguous partition of `bins` bins; sizes differ by at most one and the
/// leading experts take the remainder. Requires 1 <= experts <= bins.
std::vector<ExpertMask> build_masks(std::size_t bins, std::size_t experts);

/// Binary [experts, bins] matrix with row i the indicator of expert i's band.
Tensor mask_matrix(const std::vector<ExpertMask> & masks, std::size_t bins);

/// Applies one band mask to a spectrum [B, F, C] (the mask depends on the bin only).
ComplexTensor apply_mask(const ComplexTensor & spectrum, const ExpertMask & mask);

/// Gated mixture of frequency band experts over the time axis of [B, T, C].
///
/// The gate reads the channel-averaged spectral magnitude of each sequence and
/// emits softmax weights over experts; bin f of the output spectrum is scaled by
/// the weight of the expert owning f. Sequences whose length is not a power of two
/// are padded with their last step before the transform and truncated afterwards.
struct FrequencyMoe
{
  std::size_t length = 0;  // unpadded time length
  std::size_t experts = 1;
  std::vector<ExpertMask> masks;
  Linear gate;  // bins -> experts, zero-initialized

  static FrequencyMoe create(ParameterStore & store, const std::string & name, std::size_t length, std::size_t experts);

  std::size_t padded_length() const { return next_power_of_two(length); }
  std::size_t bins() const { return padded_length() / 2 + 1; }

  /// Expert weights [B, experts] for a spectrum [B, bins, C].
  Tensor gate_weights(const ComplexTensor & spectrum) const;
  Tensor operator()(const Tensor & x) const;
};

}  // namespace freqtraj

#endif  // FREQTRAJ__FREQ_MOE_HPP_
