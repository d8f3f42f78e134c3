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

#ifndef FREQTRAJ__EVALUATION_HPP_
#define FREQTRAJ__EVALUATION_HPP_

#include "freqtraj/decoder.hpp"
#include "freqtraj/metrics.hpp"
#include "freqtraj/model.hpp"
#include "freqtraj/scenario.hpp"

#include <span>
#include <string>
#include <vector>

namespace freqtraj
{

/// Global-frame forecast of one target.
struct PredictionRecord
{
  std::string scenario;
  std::size_t target = 0;
  ForecastD forecast;
};

/// {"predictions":[{"scenario":id,"target":int,"modes":[{"prob":p,"traj":[[x,y],...]}]}]}
std::string serialize_predictions(std::span<const PredictionRecord> records);
std::vector<PredictionRecord> parse_predictions(const std::string & text);
void save_predictions(const std::string & path, std::span<const PredictionRecord> records);
std::vector<PredictionRecord> load_predictions(const std::string & path);

/// One record per (scenario, target), in scenario then target order.
std::vector<PredictionRecord> predict_scenarios(const TrajectoryModel & model, std::span<const Scenario> scenarios);

/// Ground truth as a K=1 record set with probability 1.
std::vector<PredictionRecord> ground_truth_records(std::span<const Scenario> scenarios);

Trajectory2<double> global_future(const Scenario & scenario, std::size_t target);

struct Evaluation
{
  MetricReport report;
  std::vector<TargetMetrics> per_target;
};

/// Scores records against every target of `scenarios`. Each target needs exactly one
/// record with at least `k` modes; anything else is rejected.
Evaluation evaluate(
  std::span<const PredictionRecord> records, std::span<const Scenario> scenarios, std::size_t k,
  double miss_threshold = 2.0);

Evaluation evaluate(
  const TrajectoryModel & model, std::span<const Scenario> scenarios, std::size_t k, double miss_threshold = 2.0);

}  // namespace freqtraj

#endif  // FREQTRAJ__EVALUATION_HPP_
