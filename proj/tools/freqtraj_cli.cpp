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

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char ** argv)
{
  CLI::App app{"freqtraj: multimodal trajectory forecasting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "run";
  std::optional<std::uint64_t> seed;
  auto * train = app.add_subcommand("train", "train a model and write a checkpoint and log");
  train->add_option("--config", config_path, "JSON config file (defaults when omitted)");
  train->add_option("--seed", seed, "override training.seed");
  train->add_option("--out", out_dir, "output directory");

  std::string checkpoint;
  std::string scenarios;
  std::string predictions_out = "predictions.json";
  auto * predict = app.add_subcommand("predict", "write forecasts for a scenario file");
  predict->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  predict->add_option("--scenarios", scenarios, "scenario file")->required();
  predict->add_option("--out", predictions_out, "prediction file to write");

  freqtraj::EvalInputs eval_in;
  auto * eval = app.add_subcommand("eval", "score a checkpoint or prediction file");
  auto * ck = eval->add_option("--checkpoint", eval_in.checkpoint, "checkpoint file");
  auto * pr = eval->add_option("--predictions", eval_in.predictions, "prediction file");
  ck->excludes(pr);
  eval->add_option("--scenarios", eval_in.scenarios, "ground-truth scenario file")->required();
  eval->add_option("--k", eval_in.k, "number of modes scored")->check(CLI::PositiveNumber);
  eval->add_option("--miss-threshold", eval_in.miss_threshold, "miss distance in meters");
  eval->add_option("--csv", eval_in.csv_path, "per-target CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const freqtraj::Config config =
        config_path.empty() ? freqtraj::Config{} : freqtraj::load_config(config_path);
      const auto outcome = freqtraj::cmd_train(config, out_dir, seed);
      if (!outcome.log.empty()) {
        std::cout << "initial_total=" << outcome.log.front().loss.total << "\n"
                  << "final_total=" << outcome.log.back().loss.total << "\n";
      }
      std::cout << "checkpoint=" << outcome.checkpoint_path << "\n";
    } else if (predict->parsed()) {
      freqtraj::cmd_predict(checkpoint, scenarios, predictions_out);
    } else if (eval->parsed()) {
      freqtraj::cmd_eval(eval_in, std::cout);
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
