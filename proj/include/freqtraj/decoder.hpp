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

#ifndef FREQTRAJ__DECODER_HPP_
#define FREQTRAJ__DECODER_HPP_

#include "freqtraj/attention.hpp"
#include "freqtraj/nn.hpp"
#include "freqtraj/scenario.hpp"
#include "freqtraj/tensor.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace freqtraj
{

/// K candidate futures of one target in its local frame.
struct PredictionSet
{
  Tensor trajectories;   // [K, T_f, 2], meters
  Tensor probabilities;  // [K]
  Tensor displacements;  // [K, T_f, 2], per-step offsets summed into `trajectories`

  std::size_t modes() const { return trajectories.dim(0); }
  std::size_t horizon() const { return trajectories.dim(1); }
};

/// Mode queries refined by rounds of selective cross attention over the
/// interaction context, then decoded into cumulative displacements and mode scores.
/// Modes never attend to each other.
struct ModeDecoder
{
  std::size_t modes = 0;
  std::size_t horizon = 0;
  std::size_t width = 0;
  Tensor mode_tokens;  // [K, width]
  std::vector<SelectiveAttentionBlock> rounds;
  Linear trajectory_head;  // width -> horizon * 2
  Linear score_head;       // width -> 1

  static ModeDecoder create(
    ParameterStore & store, const std::string & name, std::size_t width, std::size_t heads, std::size_t modes,
    std::size_t horizon, std::size_t rounds);

  /// Initial queries [K, width]: the target's embedding plus each mode token.
  Tensor mode_queries(const Tensor & context, std::size_t target) const;

  /// `context` holds the interaction embeddings [N, width] of one scenario.
  PredictionSet operator()(const Tensor & context, std::size_t target, const std::vector<bool> & agent_valid) const;
};

/// Plain-value multimodal forecast, templated on the scalar type.
template <typename Scalar>
struct Forecast
{
  using Trajectory = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

  std::vector<Trajectory> modes;
  std::vector<Scalar> probabilities;

  std::size_t size() const { return modes.size(); }
};

using ForecastD = Forecast<double>;

/// Copies a prediction's values out of the tape.
ForecastD to_forecast(const PredictionSet & prediction);

/// Maps every mode from the target frame back to global coordinates.
template <typename Scalar>
Forecast<Scalar> denormalize(const Forecast<Scalar> & local, const Frame & frame)
{
  const Eigen::Matrix<Scalar, 2, 2> r = frame.rotation.cast<Scalar>();
  const Eigen::Matrix<Scalar, 1, 2> o = frame.origin.cast<Scalar>().transpose();
  Forecast<Scalar> out;
  out.probabilities = local.probabilities;
  out.modes.reserve(local.modes.size());
  for (const auto & m : local.modes) {
    typename Forecast<Scalar>::Trajectory g = m * r.transpose();
    g.rowwise() += o;
    out.modes.push_back(std::move(g));
  }
  return out;
}

}  // namespace freqtraj

#endif  // FREQTRAJ__DECODER_HPP_
