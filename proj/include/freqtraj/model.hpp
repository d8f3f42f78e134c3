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

#ifndef FREQTRAJ__MODEL_HPP_
#define FREQTRAJ__MODEL_HPP_

#include "freqtraj/attention.hpp"
#include "freqtraj/decoder.hpp"
#include "freqtraj/freq_moe.hpp"
#include "freqtraj/nn.hpp"
#include "freqtraj/patching.hpp"
#include "freqtraj/scenario.hpp"

#include <cstdint>
#include <vector>

namespace freqtraj
{

struct ModelConfig
{
  std::size_t history = 8;   // T_h
  std::size_t future = 12;   // T_f
  std::size_t hidden = 32;   // C
  std::size_t patch_hidden = 32;  // D_p
  std::size_t heads = 4;
  std::size_t modes = 5;     // K
  std::size_t refinement_rounds = 2;
  std::size_t experts = 4;
  std::vector<Granularity> granularities{{2, 1}, {4, 2}, {0, 0}};
  std::size_t loss_patch = 4;
  /// Input coordinates are divided by this many meters before embedding.
  double position_scale = 10.0;

  /// Throws std::invalid_argument("<key>: ...") on the first violated constraint.
  void validate() const;
};

/// Per-step input features [x, y, dx, dy, valid] of one agent-centric view, [N, T_h, 5].
inline constexpr std::size_t kInputFeatures = 5;
Tensor agent_features(const TargetView & view, double position_scale);

/// An agent takes part in attention when any history step is valid.
std::vector<bool> agent_validity(const TargetView & view);

/// Ground-truth future of the view's target, [T_f, 2] in the local frame.
Tensor target_future(const TargetView & view);

/// Full map-free predictor: MLP embedding -> frequency MoE filter -> multi-granularity
/// temporal branches -> fusion -> spatial selective attention -> mode decoder.
class TrajectoryModel
{
public:
  TrajectoryModel(const ModelConfig & config, std::uint64_t seed);
  TrajectoryModel(const TrajectoryModel &) = delete;
  TrajectoryModel & operator=(const TrajectoryModel &) = delete;
  TrajectoryModel(TrajectoryModel &&) = default;

  const ModelConfig & config() const { return config_; }
  ParameterStore & parameters() { return store_; }
  const ParameterStore & parameters() const { return store_; }

  struct Encoding
  {
    Tensor history_nodes;  // [N, C]
    Tensor interaction;    // [N, C]
    std::vector<bool> agent_valid;
  };

  Encoding encode(const TargetView & view) const;
  PredictionSet forward(const TargetView & view) const;
  /// Forecast in global coordinates, computed without recording a tape.
  ForecastD predict(const TargetView & view) const;

  const FrequencyMoe & frequency_filter() const { return filter_; }
  const std::vector<GranularityEncoder> & branches() const { return branches_; }
  const ModeDecoder & decoder() const { return decoder_; }

private:
  ModelConfig config_;
  ParameterStore store_;
  Mlp embedding_;
  FrequencyMoe filter_;
  std::vector<GranularityEncoder> branches_;
  GranularityFusion fusion_;
  SelectiveAttentionBlock spatial_;
  ModeDecoder decoder_;
};

}  // namespace freqtraj

#endif  // FREQTRAJ__MODEL_HPP_
