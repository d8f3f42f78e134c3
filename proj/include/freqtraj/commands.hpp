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

#ifndef FREQTRAJ__COMMANDS_HPP_
#define FREQTRAJ__COMMANDS_HPP_

#include "freqtraj/config.hpp"
#include "freqtraj/evaluation.hpp"
#include "freqtraj/training.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace freqtraj
{

inline constexpr const char * kCheckpointFile = "checkpoint.ftc";
inline constexpr const char * kTrainLogFile = "train_log.csv";
inline constexpr const char * kConfigFile = "config.json";

/// Scenarios named by `data.train_path`, or the synthetic set otherwise.
std::vector<Scenario> training_scenarios(const Config & config);

struct TrainOutcome
{
  std::vector<LogEntry> log;
  std::string checkpoint_path;
  std::string log_path;
};

/// Writes the checkpoint, the CSV log and the resolved config into `out_dir`
/// (created if missing). `seed` replaces `training.seed` when given.
TrainOutcome cmd_train(Config config, const std::string & out_dir, std::optional<std::uint64_t> seed = {});

void cmd_predict(const std::string & checkpoint, const std::string & scenario_path, const std::string & out_path);

struct EvalInputs
{
  std::string checkpoint;   // exactly one of checkpoint / predictions
  std::string predictions;
  std::string scenarios;
  std::size_t k = 5;
  double miss_threshold = 2.0;
  std::string csv_path;     // optional per-target CSV
};

/// Prints the report to `out` and returns it.
Evaluation cmd_eval(const EvalInputs & inputs, std::ostream & out);

}  // namespace freqtraj

#endif  // FREQTRAJ__COMMANDS_HPP_
