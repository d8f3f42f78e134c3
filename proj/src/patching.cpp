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

#include "freqtraj/patching.hpp"

#include <algorithm>
#include <stdexcept>

namespace freqtraj
{

Granularity Granularity::resolve(std::size_t length) const
{
  const std::size_t w = window == 0 ? length : window;
  Granularity g{w, stride != 0 ? stride : (w == length ? length : std::max<std::size_t>(1, w / 2))};
  patch_count(length, g.window, g.stride);
  return g;
}

std::size_t patch_count(std::size_t length, std::size_t window, std::size_t stride)
{
  if (window == 0 || window > length) {
    throw std::invalid_argument(
      "patch window " + std::to_string(window) + " does not fit a sequence of " + std::to_string(length));
  }
  if (stride == 0) throw std::invalid_argument("patch stride must be positive");
  return (length - window) / stride + 1;
}

Tensor patchify(const Tensor & x, std::size_t window, std::size_t stride)
{
  if (x.rank() != 3) throw ShapeError("patchify: expected [B,T,C], got " + to_string(x.shape()));
  const std::size_t b = x.dim(0);
  const std::size_t c = x.dim(2);
  const std::size_t count = patch_count(x.dim(1), window, stride);
  std::vector<Tensor> patches;
  patches.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    patches.push_back(reshape(slice(x, 1, j * stride, j * stride + window), {b, 1, window * c}));
  }
  return count == 1 ? patches.front() : concat(patches, 1);
}

std::vector<std::vector<bool>> patch_validity(
  const std::vector<std::vector<bool>> & step_valid, std::size_t window, std::size_t stride)
{
  std::vector<std::vector<bool>> out;
  out.reserve(step_valid.size());
  for (const auto & steps : step_valid) {
    const std::size_t count = patch_count(steps.size(), window, stride);
    std::vector<bool> row(count, false);
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t t = j * stride; t < j * stride + window; ++t) row[j] = row[j] || steps[t];
    }
    out.push_back(std::move(row));
  }
  return out;
}

GranularityEncoder GranularityEncoder::create(
  ParameterStore & store, const std::string & name, Granularity granularity, std::size_t length,
  std::size_t channels, std::size_t width, std::size_t heads)
{
  GranularityEncoder e;
  e.granularity = granularity.resolve(length);
  e.channels = channels;
  e.width = width;
  e.projection = Mlp::create(store, name + ".proj", e.granularity.window * channels, width, width);
  e.summary_token = store.normal(name + ".token", {width}, 0.02);
  e.tsam = SelectiveAttentionBlock::create(store, name + ".tsam", width, heads);
  return e;
}

Tensor GranularityEncoder::embed(const Tensor & history) const
{
  return projection(patchify(history, granularity.window, granularity.stride));
}

Tensor GranularityEncoder::encode(const Tensor & patches, const std::vector<std::vector<bool>> & patch_valid) const
{
  if (patches.rank() != 3 || patches.dim(2) != width) {
    throw ShapeError("encode: expected [B,P," + std::to_string(width) + "], got " + to_string(patches.shape()));
  }
  const std::size_t b = patches.dim(0);
  const std::size_t length = patches.dim(1) + 1;
  Tensor token = expand(reshape(summary_token, {1, 1, width}), {b, 1, width});
  Tensor sequence = concat({token, patches}, 1) + sinusoidal_positions(length, width);
  Tensor out = freqtraj::tsam(this->tsam, sequence, patch_valid);
  return reshape(slice(out, 1, 0, 1), {b, width});
}

Tensor GranularityEncoder::operator()(const Tensor & history, const std::vector<std::vector<bool>> & step_valid) const
{
  std::vector<std::vector<bool>> valid;
  if (!step_valid.empty()) valid = patch_validity(step_valid, granularity.window, granularity.stride);
  return encode(embed(history), valid);
}

GranularityFusion GranularityFusion::create(
  ParameterStore & store, const std::string & name, std::size_t branches, std::size_t branch_width,
  std::size_t out_width)
{
  return {Mlp::create(store, name, branches * branch_width, out_width, out_width)};
}

Tensor GranularityFusion::operator()(const std::vector<Tensor> & summaries) const
{
  if (summaries.empty()) throw std::invalid_argument("fuse_granularities: no summaries");
  return mlp(summaries.size() == 1 ? summaries.front() : concat(summaries, 1));
}

}  // namespace freqtraj
