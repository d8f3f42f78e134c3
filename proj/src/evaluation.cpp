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

#include "freqtraj/evaluation.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace freqtraj
{

using json = nlohmann::json;

std::string serialize_predictions(std::span<const PredictionRecord> records)
{
  json list = json::array();
  for (const auto & r : records) {
    json modes = json::array();
    for (std::size_t k = 0; k < r.forecast.size(); ++k) {
      json traj = json::array();
      const auto & m = r.forecast.modes[k];
      for (Eigen::Index i = 0; i < m.rows(); ++i) traj.push_back(json::array({m(i, 0), m(i, 1)}));
      modes.push_back({{"prob", r.forecast.probabilities[k]}, {"traj", traj}});
    }
    list.push_back({{"scenario", r.scenario}, {"target", r.target}, {"modes", modes}});
  }
  return json{{"predictions", list}}.dump();
}

std::vector<PredictionRecord> parse_predictions(const std::string & text)
{
  std::vector<PredictionRecord> out;
  try {
    const json doc = json::parse(text);
    const auto & list = doc.at("predictions");
    if (!list.is_array()) throw std::invalid_argument("\"predictions\" must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto & r = list[i];
      PredictionRecord rec;
      rec.scenario = r.at("scenario").get<std::string>();
      rec.target = r.at("target").get<std::size_t>();
      for (const auto & m : r.at("modes")) {
        const auto & traj = m.at("traj");
        ForecastD::Trajectory path(static_cast<Eigen::Index>(traj.size()), 2);
        for (std::size_t t = 0; t < traj.size(); ++t) {
          if (traj[t].size() != 2) throw std::invalid_argument("trajectory points must be [x, y]");
          path(static_cast<Eigen::Index>(t), 0) = traj[t][0].get<double>();
          path(static_cast<Eigen::Index>(t), 1) = traj[t][1].get<double>();
        }
        rec.forecast.modes.push_back(std::move(path));
        rec.forecast.probabilities.push_back(m.at("prob").get<double>());
      }
      out.push_back(std::move(rec));
    }
  } catch (const json::exception & e) {
    throw std::invalid_argument(std::string("malformed prediction file: ") + e.what());
  }
  return out;
}

void save_predictions(const std::string & path, std::span<const PredictionRecord> records)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write prediction file " + path);
  out << serialize_predictions(records) << '\n';
}

std::vector<PredictionRecord> load_predictions(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prediction file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_predictions(buf.str());
}

std::vector<PredictionRecord> predict_scenarios(const TrajectoryModel & model, std::span<const Scenario> scenarios)
{
  std::vector<PredictionRecord> out;
  for (const auto & s : scenarios) {
    if (s.history_length() != model.config().history || s.future_length() != model.config().future) {
      throw std::invalid_argument(
        "scenario '" + s.id + "' has horizons " + std::to_string(s.history_length()) + "/" +
        std::to_string(s.future_length()) + " but the model uses " + std::to_string(model.config().history) + "/" +
        std::to_string(model.config().future));
    }
    const NormalizedScenario n = normalize(s);
    for (const auto & view : n.views) out.push_back({s.id, view.target, model.predict(view)});
  }
  return out;
}

Trajectory2<double> global_future(const Scenario & scenario, std::size_t target)
{
  const auto & f = scenario.agents.at(target).future;
  Trajectory2<double> out(static_cast<Eigen::Index>(f.size()), 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = f[i].x;
    out(static_cast<Eigen::Index>(i), 1) = f[i].y;
  }
  return out;
}

std::vector<PredictionRecord> ground_truth_records(std::span<const Scenario> scenarios)
{
  std::vector<PredictionRecord> out;
  for (const auto & s : scenarios) {
    for (std::size_t t : s.targets) {
      PredictionRecord r{s.id, t, {}};
      r.forecast.modes.push_back(global_future(s, t));
      r.forecast.probabilities.push_back(1.0);
      out.push_back(std::move(r));
    }
  }
  return out;
}

Evaluation evaluate(
  std::span<const PredictionRecord> records, std::span<const Scenario> scenarios, std::size_t k, double miss_threshold)
{
  if (k == 0) throw std::invalid_argument("k must be positive");
  std::map<std::pair<std::string, std::size_t>, const PredictionRecord *> index;
  for (const auto & r : records) {
    if (!index.emplace(std::make_pair(r.scenario, r.target), &r).second) {
      throw std::invalid_argument("duplicate prediction for scenario '" + r.scenario + "' target " + std::to_string(r.target));
    }
  }
  Evaluation ev;
  for (const auto & s : scenarios) {
    for (std::size_t t : s.targets) {
      auto it = index.find({s.id, t});
      if (it == index.end()) {
        throw std::invalid_argument("no prediction for scenario '" + s.id + "' target " + std::to_string(t));
      }
      const ForecastD & f = it->second->forecast;
      if (f.size() < k) {
        throw std::invalid_argument("k=" + std::to_string(k) + " exceeds the " + std::to_string(f.size()) +
                                    " modes predicted for scenario '" + s.id + "' target " + std::to_string(t));
      }
      TargetMetrics m = score_target(f, global_future(s, t), k, miss_threshold);
      m.scenario = s.id;
      m.target = t;
      ev.per_target.push_back(std::move(m));
    }
  }
  ev.report = aggregate(ev.per_target, k, miss_threshold);
  return ev;
}

Evaluation evaluate(
  const TrajectoryModel & model, std::span<const Scenario> scenarios, std::size_t k, double miss_threshold)
{
  if (k == 0 || k > model.config().modes) {
    throw std::invalid_argument(
      "k=" + std::to_string(k) + " but the model emits " + std::to_string(model.config().modes) + " modes");
  }
  const auto records = predict_scenarios(model, scenarios);
  return evaluate(records, scenarios, k, miss_threshold);
}

}  // namespace freqtraj
