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

#ifndef FREQTRAJ__TRAINING_HPP_
#define FREQTRAJ__TRAINING_HPP_

#include "freqtraj/losses.hpp"
#include "freqtraj/model.hpp"
#include "freqtraj/nn.hpp"
#include "freqtraj/scenario.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace freqtraj
{

/// Adam with bias correction. Moments are kept per parameter in store order.
class Adam
{
public:
  struct Options
  {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam(std::vector<NamedParameter> & params, Options options);

  /// Applies one update from the accumulated gradients; parameters without a
  /// gradient are left untouched.
  void step();
  std::size_t steps_taken() const { return t_; }

private:
  std::vector<NamedParameter> & params_;
  Options options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t t_ = 0;
};

struct TrainConfig
{
  std::size_t steps = 500;
  double learning_rate = 1e-3;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  LossWeights weights;

  void validate() const;
};

/// One target view of one scenario with its local-frame ground truth.
struct TrainingSample
{
  std::string scenario;
  TargetView view;
  Tensor truth;  // [T_f, 2]
};

std::vector<TrainingSample> make_samples(std::span<const Scenario> scenarios);

struct LogEntry
{
  std::size_t step = 0;
  LossReport loss;
};

/// Forward pass and loss over a set of samples (taped).
std::vector<TargetLoss> sample_losses(const TrajectoryModel & model, std::span<const TrainingSample> samples);

/// Loss over all samples without recording a tape.
LossReport dataset_loss(const TrajectoryModel & model, std::span<const TrainingSample> samples, const LossWeights & w);

/// Runs `config.steps` Adam updates on scenario batches taken cyclically from
/// `scenarios` (batch i covers scenarios [i * bs, i * bs + bs) modulo the count).
/// Every target view of a scenario is part of its batch. Entry i logs the loss
/// measured before update i.
std::vector<LogEntry> train(
  TrajectoryModel & model, std::span<const Scenario> scenarios, const TrainConfig & config,
  const std::function<void(const LogEntry &)> & on_step = {});

std::string format_log_header();
std::string format_log_line(const LogEntry & entry);

}  // namespace freqtraj

#endif  // FREQTRAJ__TRAINING_HPP_
