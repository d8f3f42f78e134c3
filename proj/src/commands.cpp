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

#include "freqtraj/commands.hpp"

#include "freqtraj/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace freqtraj
{

std::vector<Scenario> training_scenarios(const Config & config)
{
  if (!config.data.train_path.empty()) return load_scenarios(config.data.train_path);
  return generate_synthetic(config.data.synthetic, config.data.synthetic_seed);
}

TrainOutcome cmd_train(Config config, const std::string & out_dir, std::optional<std::uint64_t> seed)
{
  if (seed) config.training.seed = *seed;
  config.validate();
  const auto scenarios = training_scenarios(config);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  TrainOutcome outcome;
  outcome.checkpoint_path = (dir / kCheckpointFile).string();
  outcome.log_path = (dir / kTrainLogFile).string();

  std::ofstream log_file(outcome.log_path);
  if (!log_file) throw std::runtime_error("cannot write " + outcome.log_path);
  log_file << format_log_header() << '\n';

  TrajectoryModel model(config.model, config.training.seed);
  outcome.log = train(model, scenarios, config.training, [&](const LogEntry & e) {
    log_file << format_log_line(e) << '\n';
  });
  log_file.flush();

  save_checkpoint(outcome.checkpoint_path, model, config, config.training.steps);
  std::ofstream cfg((dir / kConfigFile).string());
  cfg << serialize_config(config) << '\n';
  return outcome;
}

void cmd_predict(const std::string & checkpoint, const std::string & scenario_path, const std::string & out_path)
{
  const LoadedCheckpoint ckpt = load_checkpoint(checkpoint);
  const auto scenarios = load_scenarios(scenario_path);
  const auto records = predict_scenarios(ckpt.model, scenarios);
  save_predictions(out_path, records);
}

Evaluation cmd_eval(const EvalInputs & in, std::ostream & out)
{
  if (in.checkpoint.empty() == in.predictions.empty()) {
    throw std::invalid_argument("eval needs exactly one of a checkpoint or a prediction file");
  }
  if (in.miss_threshold <= 0.0) throw std::invalid_argument("miss threshold must be positive");
  const auto scenarios = load_scenarios(in.scenarios);
  Evaluation ev;
  if (!in.checkpoint.empty()) {
    const LoadedCheckpoint ckpt = load_checkpoint(in.checkpoint);
    ev = evaluate(ckpt.model, scenarios, in.k, in.miss_threshold);
  } else {
    const auto records = load_predictions(in.predictions);
    ev = evaluate(records, scenarios, in.k, in.miss_threshold);
  }
  out << format_report(ev.report);
  if (!in.csv_path.empty()) {
    std::ofstream csv(in.csv_path);
    if (!csv) throw std::runtime_error("cannot write " + in.csv_path);
    csv << format_csv(ev.per_target);
  }
  return ev;
}

}  // namespace freqtraj
