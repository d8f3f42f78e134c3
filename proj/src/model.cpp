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

#include "freqtraj/model.hpp"

#include <stdexcept>
#include <string>

namespace freqtraj
{

void ModelConfig::validate() const
{
  auto require = [](bool ok, const std::string & what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(history >= 2, "model.history: must be at least 2");
  require(future >= 1, "model.future: must be at least 1");
  require(hidden > 0, "model.hidden: must be positive");
  require(patch_hidden > 0, "model.patch_hidden: must be positive");
  require(heads > 0 && hidden % heads == 0, "model.heads: must divide model.hidden");
  require(patch_hidden % heads == 0, "model.heads: must divide model.patch_hidden");
  require(modes > 0, "model.modes: must be positive");
  require(refinement_rounds > 0, "model.refinement_rounds: must be positive");
  const std::size_t bins = next_power_of_two(history) / 2 + 1;
  require(experts > 0 && experts <= bins,
          "model.experts: must lie in [1, " + std::to_string(bins) + "] for history " + std::to_string(history));
  require(!granularities.empty(), "model.granularities: at least one window required");
  for (const auto & g : granularities) {
    try {
      g.resolve(history);
    } catch (const std::invalid_argument & e) {
      throw std::invalid_argument(std::string("model.granularities: ") + e.what());
    }
  }
  require(loss_patch > 0 && future % loss_patch == 0, "model.loss_patch: must divide model.future");
  require(position_scale > 0.0, "model.position_scale: must be positive");
}

Tensor agent_features(const TargetView & view, double position_scale)
{
  const std::size_t n = view.agents.size();
  const std::size_t t = view.agents.front().history.size();
  std::vector<double> values(n * t * kInputFeatures, 0.0);
  const double inv = 1.0 / position_scale;
  for (std::size_t a = 0; a < n; ++a) {
    const auto & h = view.agents[a].history;
    for (std::size_t i = 0; i < t; ++i) {
      if (!h[i].valid) continue;
      double * row = values.data() + (a * t + i) * kInputFeatures;
      row[0] = h[i].x * inv;
      row[1] = h[i].y * inv;
      if (i > 0 && h[i - 1].valid) {
        row[2] = (h[i].x - h[i - 1].x) * inv;
        row[3] = (h[i].y - h[i - 1].y) * inv;
      }
      row[4] = 1.0;
    }
  }
  return Tensor::from({n, t, kInputFeatures}, std::move(values));
}

std::vector<bool> agent_validity(const TargetView & view)
{
  std::vector<bool> valid;
  for (const auto & a : view.agents) {
    bool any = false;
    for (const auto & s : a.history) any = any || s.valid;
    valid.push_back(any);
  }
  return valid;
}

Tensor target_future(const TargetView & view)
{
  const auto & f = view.agents[view.target].future;
  std::vector<double> values;
  values.reserve(f.size() * 2);
  for (const auto & s : f) {
    values.push_back(s.x);
    values.push_back(s.y);
  }
  return Tensor::from({f.size(), 2}, std::move(values));
}

TrajectoryModel::TrajectoryModel(const ModelConfig & config, std::uint64_t seed) : config_(config), store_(seed)
{
  config_.validate();
  const auto & c = config_;
  embedding_ = Mlp::create(store_, "embedding", kInputFeatures, c.hidden, c.hidden);
  filter_ = FrequencyMoe::create(store_, "moe", c.history, c.experts);
  for (std::size_t i = 0; i < c.granularities.size(); ++i) {
    branches_.push_back(GranularityEncoder::create(
      store_, "branch" + std::to_string(i), c.granularities[i], c.history, c.hidden, c.patch_hidden, c.heads));
  }
  fusion_ = GranularityFusion::create(store_, "fusion", branches_.size(), c.patch_hidden, c.hidden);
  spatial_ = SelectiveAttentionBlock::create(store_, "ssam", c.hidden, c.heads);
  decoder_ = ModeDecoder::create(store_, "decoder", c.hidden, c.heads, c.modes, c.future, c.refinement_rounds);
}

TrajectoryModel::Encoding TrajectoryModel::encode(const TargetView & view) const
{
  if (view.agents.empty() || view.agents.front().history.size() != config_.history) {
    throw std::invalid_argument("model expects " + std::to_string(config_.history) + " history steps");
  }
  std::vector<std::vector<bool>> step_valid;
  for (const auto & a : view.agents) {
    std::vector<bool> row;
    for (const auto & s : a.history) row.push_back(s.valid);
    step_valid.push_back(std::move(row));
  }

  Tensor embedded = embedding_(agent_features(view, config_.position_scale));  // [N, T, C]
  Tensor filtered = filter_(embedded);
  std::vector<Tensor> summaries;
  summaries.reserve(branches_.size());
  for (const auto & branch : branches_) summaries.push_back(branch(filtered, step_valid));

  Encoding e;
  e.agent_valid = agent_validity(view);
  e.history_nodes = fusion_(summaries);
  e.interaction = ssam(spatial_, e.history_nodes, e.agent_valid);
  return e;
}

PredictionSet TrajectoryModel::forward(const TargetView & view) const
{
  if (view.agents.front().future.size() != config_.future) {
    throw std::invalid_argument("model predicts " + std::to_string(config_.future) + " future steps");
  }
  Encoding e = encode(view);
  return decoder_(e.interaction, view.target, e.agent_valid);
}

ForecastD TrajectoryModel::predict(const TargetView & view) const
{
  NoGradGuard no_grad;
  return denormalize(to_forecast(forward(view)), view.frame);
}

}  // namespace freqtraj
