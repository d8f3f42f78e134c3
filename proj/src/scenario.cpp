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

#include "freqtraj/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace freqtraj
{

using json = nlohmann::json;

namespace
{

[[noreturn]] void fail(const Scenario & s, std::size_t index, const std::string & what)
{
  throw ScenarioError("scenario " + std::to_string(index) + " ('" + s.id + "'): " + what);
}

void validate_at(const Scenario & s, std::size_t index)
{
  if (s.agents.empty()) fail(s, index, "no agents");
  if (!(s.dt > 0.0)) fail(s, index, "dt must be positive");
  const std::size_t th = s.history_length();
  const std::size_t tf = s.future_length();
  if (th < 2) fail(s, index, "history length " + std::to_string(th) + " < 2");
  if (tf < 1) fail(s, index, "future length must be at least 1");
  for (std::size_t a = 0; a < s.agents.size(); ++a) {
    const Agent & agent = s.agents[a];
    if (agent.history.size() != th) {
      fail(s, index, "agent " + std::to_string(a) + " has " + std::to_string(agent.history.size()) +
                       " history states, expected " + std::to_string(th));
    }
    if (agent.future.size() != tf) {
      fail(s, index, "agent " + std::to_string(a) + " has " + std::to_string(agent.future.size()) +
                       " future states, expected " + std::to_string(tf));
    }
  }
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    const std::size_t t = s.targets[i];
    if (t >= s.agents.size()) fail(s, index, "target " + std::to_string(t) + " out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (s.targets[j] == t) fail(s, index, "target " + std::to_string(t) + " listed twice");
    }
    if (!s.agents[t].history.back().valid) {
      fail(s, index, "target agent " + std::to_string(t) + " has no valid state at t=0");
    }
    for (const auto & st : s.agents[t].future) {
      if (!st.valid) fail(s, index, "target agent " + std::to_string(t) + " has an invalid future state");
    }
  }
}

std::vector<AgentState> parse_states(const json & rows)
{
  std::vector<AgentState> out;
  out.reserve(rows.size());
  for (const auto & row : rows) {
    if (!row.is_array() || row.size() != 3) throw ScenarioError("state must be [x, y, valid]");
    AgentState st;
    st.x = row[0].get<double>();
    st.y = row[1].get<double>();
    st.valid = row[2].is_boolean() ? row[2].get<bool>() : row[2].get<double>() != 0.0;
    out.push_back(st);
  }
  return out;
}

json states_json(const std::vector<AgentState> & states)
{
  json rows = json::array();
  for (const auto & st : states) rows.push_back(json::array({st.x, st.y, st.valid}));
  return rows;
}

Eigen::Vector2d position(const AgentState & s) { return {s.x, s.y}; }

}  // namespace

void validate(const Scenario & scenario) { validate_at(scenario, 0); }

std::vector<Scenario> parse_scenarios(const std::string & text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ScenarioError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("scenarios") || !doc["scenarios"].is_array()) {
    throw ScenarioError("scenario file needs a top-level \"scenarios\" array");
  }
  std::vector<Scenario> out;
  const auto & records = doc["scenarios"];
  for (std::size_t i = 0; i < records.size(); ++i) {
    Scenario s;
    try {
      const auto & r = records[i];
      s.id = r.at("id").get<std::string>();
      s.dt = r.at("dt").get<double>();
      for (const auto & a : r.at("agents")) {
        s.agents.push_back({parse_states(a.at("history")), parse_states(a.at("future"))});
      }
      for (const auto & t : r.at("targets")) {
        if (!t.is_number_integer() || t.get<long long>() < 0) throw ScenarioError("targets must be non-negative integers");
        s.targets.push_back(t.get<std::size_t>());
      }
    } catch (const json::exception & e) {
      throw ScenarioError("scenario record " + std::to_string(i) + " is malformed: " + e.what());
    } catch (const ScenarioError & e) {
      throw ScenarioError("scenario record " + std::to_string(i) + " is malformed: " + e.what());
    }
    validate_at(s, i);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenarios(buf.str());
}

std::string serialize_scenarios(const std::vector<Scenario> & scenarios)
{
  json list = json::array();
  for (const auto & s : scenarios) {
    json agents = json::array();
    for (const auto & a : s.agents) agents.push_back({{"history", states_json(a.history)}, {"future", states_json(a.future)}});
    list.push_back({{"id", s.id}, {"dt", s.dt}, {"agents", agents}, {"targets", s.targets}});
  }
  return json{{"scenarios", list}}.dump();
}

void save_scenarios(const std::string & path, const std::vector<Scenario> & scenarios)
{
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file " + path);
  out << serialize_scenarios(scenarios) << '\n';
}

Frame target_frame(const Agent & target)
{
  Frame f;
  f.origin = position(target.history.back());
  for (std::size_t t = target.history.size(); t-- > 1;) {
    if (!target.history[t].valid || !target.history[t - 1].valid) continue;
    const Eigen::Vector2d d = position(target.history[t]) - position(target.history[t - 1]);
    const double n = d.norm();
    if (n > 1e-9) {
      const double c = d.x() / n;
      const double s = d.y() / n;
      f.rotation << c, -s, s, c;
    }
    break;
  }
  return f;
}

NormalizedScenario normalize(const Scenario & scenario)
{
  NormalizedScenario out;
  out.id = scenario.id;
  out.dt = scenario.dt;
  auto to_local = [](const Frame & f, const std::vector<AgentState> & states) {
    std::vector<AgentState> local;
    local.reserve(states.size());
    for (const auto & st : states) {
      if (!st.valid) {
        local.push_back({0.0, 0.0, false});
        continue;
      }
      const Eigen::Vector2d p = f.to_local(position(st));
      local.push_back({p.x(), p.y(), true});
    }
    return local;
  };
  for (std::size_t target : scenario.targets) {
    TargetView view;
    view.target = target;
    view.frame = target_frame(scenario.agents[target]);
    for (const auto & a : scenario.agents) view.agents.push_back({to_local(view.frame, a.history), to_local(view.frame, a.future)});
    out.views.push_back(std::move(view));
  }
  return out;
}

// ---------------------------------------------------------------------------

Eigen::Vector2d maneuver_position(const ManeuverSpec & maneuver, double seconds)
{
  const Eigen::Vector2d forward(std::cos(maneuver.heading), std::sin(maneuver.heading));
  const Eigen::Vector2d left(-forward.y(), forward.x());
  switch (maneuver.kind) {
    case Maneuver::kConstantVelocity:
      return maneuver.start + maneuver.speed * seconds * forward;
    case Maneuver::kConstantTurn: {
      const Eigen::Vector2d center = maneuver.start + maneuver.turn_sign * maneuver.radius * left;
      const Eigen::Vector2d arm = maneuver.start - center;
      const double phase = std::atan2(arm.y(), arm.x()) + maneuver.turn_sign * maneuver.speed * seconds / maneuver.radius;
      return center + maneuver.radius * Eigen::Vector2d(std::cos(phase), std::sin(phase));
    }
    case Maneuver::kLaneChange: {
      auto profile = [&](double t) { return 1.0 / (1.0 + std::exp(-(t - maneuver.change_time) / maneuver.change_duration)); };
      const double lateral = maneuver.lateral_offset * (profile(seconds) - profile(0.0));
      return maneuver.start + maneuver.speed * seconds * forward + lateral * left;
    }
  }
  return maneuver.start;
}

void validate(const GenConfig & c)
{
  auto require = [](bool ok, const char * field) {
    if (!ok) throw std::invalid_argument(std::string("synthetic config: invalid ") + field);
  };
  require(c.scenarios > 0, "scenarios");
  require(c.min_agents > 0, "min_agents");
  require(c.max_agents >= c.min_agents, "max_agents");
  require(c.targets > 0 && c.targets <= c.min_agents, "targets");
  require(c.history >= 2, "history");
  require(c.future >= 1, "future");
  require(c.dt > 0.0, "dt");
  require(c.min_speed >= 0.0 && c.max_speed >= c.min_speed, "speed range");
  require(c.min_radius > 0.0 && c.max_radius >= c.min_radius, "radius range");
  require(c.max_lateral >= c.min_lateral, "lateral range");
  require(c.constant_velocity_weight >= 0.0 && c.constant_turn_weight >= 0.0 && c.lane_change_weight >= 0.0 &&
            c.constant_velocity_weight + c.constant_turn_weight + c.lane_change_weight > 0.0,
          "maneuver weights");
  require(c.noise_std >= 0.0, "noise_std");
  require(c.spawn_radius >= 0.0, "spawn_radius");
  require(c.dropout >= 0.0 && c.dropout < 1.0, "dropout");
}

std::vector<Scenario> generate_synthetic(const GenConfig & config, std::uint64_t seed)
{
  validate(config);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::normal_distribution<double> noise(0.0, 1.0);

  const double total_weight =
    config.constant_velocity_weight + config.constant_turn_weight + config.lane_change_weight;
  const double horizon = static_cast<double>(config.future) * config.dt;

  std::vector<Scenario> out;
  for (std::size_t i = 0; i < config.scenarios; ++i) {
    Scenario s;
    s.id = "synthetic-" + std::to_string(seed) + "-" + std::to_string(i);
    s.dt = config.dt;
    const std::size_t span = config.max_agents - config.min_agents + 1;
    const std::size_t count = config.min_agents + static_cast<std::size_t>(unit(rng) * static_cast<double>(span)) % span;
    for (std::size_t a = 0; a < count; ++a) {
      ManeuverSpec m;
      const double pick = unit(rng) * total_weight;
      m.kind = pick < config.constant_velocity_weight ? Maneuver::kConstantVelocity
               : pick < config.constant_velocity_weight + config.constant_turn_weight ? Maneuver::kConstantTurn
                                                                                     : Maneuver::kLaneChange;
      m.start = Eigen::Vector2d(uniform(-config.spawn_radius, config.spawn_radius),
                                uniform(-config.spawn_radius, config.spawn_radius));
      m.heading = uniform(-3.141592653589793, 3.141592653589793);
      m.speed = uniform(config.min_speed, config.max_speed);
      m.radius = uniform(config.min_radius, config.max_radius);
      m.turn_sign = unit(rng) < 0.5 ? -1.0 : 1.0;
      m.lateral_offset = (unit(rng) < 0.5 ? -1.0 : 1.0) * uniform(config.min_lateral, config.max_lateral);
      m.change_time = uniform(0.1 * horizon, 0.5 * horizon);
      m.change_duration = uniform(0.3, 0.8);

      const bool is_target = a < config.targets;
      Agent agent;
      const long th = static_cast<long>(config.history);
      for (long t = -th + 1; t <= static_cast<long>(config.future); ++t) {
        Eigen::Vector2d p = maneuver_position(m, static_cast<double>(t) * config.dt);
        if (config.noise_std > 0.0) p += config.noise_std * Eigen::Vector2d(noise(rng), noise(rng));
        AgentState st{p.x(), p.y(), true};
        if (t < 0 && !is_target && config.dropout > 0.0 && unit(rng) < config.dropout) st.valid = false;
        (t <= 0 ? agent.history : agent.future).push_back(st);
      }
      s.agents.push_back(std::move(agent));
    }
    for (std::size_t t = 0; t < config.targets; ++t) s.targets.push_back(t);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace freqtraj
