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

#ifndef FREQTRAJ__PATCHING_HPP_
#define FREQTRAJ__PATCHING_HPP_

#include "freqtraj/attention.hpp"
#include "freqtraj/nn.hpp"
#include "freqtraj/tensor.hpp"

#include <string>
#include <vector>

namespace freqtraj
{

/// Sliding window over the time axis. A window of 0 means "the whole sequence"; a
/// stride of 0 means half the window (or the whole sequence for a full window).
struct Granularity
{
  std::size_t window = 0;
  std::size_t stride = 0;

  /// Concrete (window, stride) for a sequence of `length` steps; validates.
  Granularity resolve(std::size_t length) const;
};

/// floor((length - window) / stride) + 1; throws if window > length or stride == 0.
std::size_t patch_count(std::size_t length, std::size_t window, std::size_t stride);

/// x[B, T, C] -> [B, P, window * C]; patch j covers steps [j * stride, j * stride + window).
/// Steps after the last full window are dropped.
Tensor patchify(const Tensor & x, std::size_t window, std::size_t stride);

/// A patch is usable when at least one of its steps is valid.
std::vector<std::vector<bool>> patch_validity(
  const std::vector<std::vector<bool>> & step_valid, std::size_t window, std::size_t stride);

/// One temporal branch: patch projection, summary token, positional encoding and TSAM.
struct GranularityEncoder
{
  Granularity granularity;  // resolved
  std::size_t channels = 0;
  std::size_t width = 0;  // patch hidden size
  Mlp projection;         // window * channels -> width -> width
  Tensor summary_token;   // [width]
  SelectiveAttentionBlock tsam;

  static GranularityEncoder create(
    ParameterStore & store, const std::string & name, Granularity granularity, std::size_t length,
    std::size_t channels, std::size_t width, std::size_t heads);

  /// Projected patches [B, P, width] for a filtered history [B, T, channels].
  Tensor embed(const Tensor & history) const;
  /// Summary read-out [B, width] from projected patches.
  Tensor encode(const Tensor & patches, const std::vector<std::vector<bool>> & patch_valid = {}) const;
  Tensor operator()(const Tensor & history, const std::vector<std::vector<bool>> & step_valid = {}) const;
};

/// Concatenates per-granularity summaries along features and maps them to the node width.
struct GranularityFusion
{
  Mlp mlp;

  static GranularityFusion create(
    ParameterStore & store, const std::string & name, std::size_t branches, std::size_t branch_width,
    std::size_t out_width);

  Tensor operator()(const std::vector<Tensor> & summaries) const;
};

}  // namespace freqtraj

#endif  // FREQTRAJ__PATCHING_HPP_
