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

#include "freqtraj/decoder.hpp"

#include <stdexcept>

namespace freqtraj
{

ModeDecoder ModeDecoder::create(
  ParameterStore & store, const std::string & name, std::size_t width, std::size_t heads, std::size_t modes,
  std::size_t horizon, std::size_t rounds)
{
  if (modes == 0) throw std::invalid_argument("decoder needs at least one mode");
  if (rounds == 0) throw std::invalid_argument("decoder needs at least one refinement round");
  ModeDecoder d;
  d.modes = modes;
  d.horizon = horizon;
  d.width = width;
  d.mode_tokens = store.normal(name + ".mode_tokens", {modes, width}, 0.02);
  for (std::size_t r = 0; r < rounds; ++r) {
    d.rounds.push_back(SelectiveAttentionBlock::create(store, name + ".round" + std::to_string(r), width, heads));
  }
  d.trajectory_head = Linear::kaiming(store, name + ".trajectory_head", width, horizon * 2);
  d.score_head = Linear::kaiming(store, name + ".score_head", width, 1);
  return d;
}

Tensor ModeDecoder::mode_queries(const Tensor & context, std::size_t target) const
{
  if (context.rank() != 2 || context.dim(1) != width) {
    throw ShapeError("decoder: context " + to_string(context.shape()) + " for width " + std::to_string(width));
  }
  if (target >= context.dim(0)) {
    throw std::out_of_range("decoder: target index " + std::to_string(target) + " with " +
                            std::to_string(context.dim(0)) + " agents");
  }
  return mode_tokens + reshape(slice(context, 0, target, target + 1), {width});
}

PredictionSet ModeDecoder::operator()(
  const Tensor & context, std::size_t target, const std::vector<bool> & agent_valid) const
{
  Tensor queries = reshape(mode_queries(context, target), {1, modes, width});
  const std::size_t n = context.dim(0);
  if (agent_valid.size() != n) throw ShapeError("decoder: agent validity size mismatch");
  Tensor keys = reshape(context, {1, n, width});
  const Tensor mask = key_padding_mask({agent_valid}, modes);
  for (const auto & round : rounds) queries = round(queries, keys, mask);
  Tensor q = reshape(queries, {modes, width});

  PredictionSet p;
  p.displacements = reshape(trajectory_head(q), {modes, horizon, 2});
  p.trajectories = cumsum(p.displacements, 1);
  p.probabilities = softmax(reshape(score_head(q), {modes}));
  return p;
}

ForecastD to_forecast(const PredictionSet & prediction)
{
  ForecastD f;
  const std::size_t k = prediction.modes();
  const std::size_t t = prediction.horizon();
  auto traj = prediction.trajectories.data();
  for (std::size_t m = 0; m < k; ++m) {
    ForecastD::Trajectory path(t, 2);
    for (std::size_t i = 0; i < t; ++i) {
      path(i, 0) = traj[(m * t + i) * 2];
      path(i, 1) = traj[(m * t + i) * 2 + 1];
    }
    f.modes.push_back(std::move(path));
    f.probabilities.push_back(prediction.probabilities[m]);
  }
  return f;
}

}  // namespace freqtraj
