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

#ifndef FREQTRAJ__SCENARIO_HPP_
#define FREQTRAJ__SCENARIO_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqtraj
{

class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Position in meters. Invalid states are padding: their coordinates are carried
/// through I/O but never enter any computation.
struct AgentState
{
  double x = 0.0;
  double y = 0.0;
  bool valid = false;

  bool operator==(const AgentState &) const = default;
};

/// `history` runs oldest to newest, so history.back() is the reference step t = 0;
/// `future[i]` is step i + 1.
struct Agent
{
  std::vector<AgentState> history;
  std::vector<AgentState> future;

  bool operator==(const Agent &) const = default;
};

struct Scenario
{
  std::string id;
  double dt = 0.1;
  std::vector<Agent> agents;
  std::vector<std::size_t> targets;

  std::size_t history_length() const { return agents.empty() ? 0 : agents.front().history.size(); }
  std::size_t future_length() const { return agents.empty() ? 0 : agents.front().future.size(); }

  bool operator==(const Scenario &) const = default;
};

/// Throws ScenarioError describing the first violated invariant: shared horizons,
/// history >= 2, future >= 1, targets in range with a valid reference state and a
/// fully valid future.
void validate(const Scenario & scenario);

/// JSON scenario file: {"scenarios":[{"id","dt","agents":[{"history":[[x,y,valid],...],
/// "future":[...]}],"targets":[...]}]}. Every returned scenario passed `validate`.
std::vector<Scenario> parse_scenarios(const std::string & text);
std::vector<Scenario> load_scenarios(const std::string & path);
std::string serialize_scenarios(const std::vector<Scenario> & scenarios);
void save_scenarios(const std::string & path, const std::vector<Scenario> & scenarios);

/// Rigid target-centric frame: local = R^T (global - origin).
struct Frame
{
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();

  Eigen::Vector2d to_local(const Eigen::Vector2d & global) const { return rotation.transpose() * (global - origin); }
  Eigen::Vector2d to_global(const Eigen::Vector2d & local) const { return rotation * local + origin; }
};

/// Frame at the target's reference position, x axis along its last valid history
/// displacement; identity rotation when that displacement is zero.
Frame target_frame(const Agent & target);

/// All agents of a scenario seen from one target.
struct TargetView
{
  std::size_t target = 0;
  Frame frame;
  std::vector<Agent> agents;  // local coordinates; validity flags unchanged
};

struct NormalizedScenario
{
  std::string id;
  double dt = 0.0;
  std::vector<TargetView> views;  // one per target, in target order
};

NormalizedScenario normalize(const Scenario & scenario);

// ---------------------------------------------------------------------------
// Synthetic scenarios

enum class Maneuver
{
  kConstantVelocity,
  kConstantTurn,
  kLaneChange,
};

/// Motion parameters of one agent; `start` is the position at t = 0.
struct ManeuverSpec
{
  Maneuver kind = Maneuver::kConstantVelocity;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  double heading = 0.0;  // radians
  double speed = 0.0;    // m/s
  double radius = 0.0;   // turn radius, kConstantTurn
  double turn_sign = 1.0;  // +1 left, -1 right
  double lateral_offset = 0.0;  // kLaneChange total lateral shift
  double change_time = 0.0;     // kLaneChange midpoint, seconds from t = 0
  double change_duration = 1.0; // kLaneChange sigmoid time scale
};

/// Noise-free position at time `seconds` (negative for history).
Eigen::Vector2d maneuver_position(const ManeuverSpec & maneuver, double seconds);

struct GenConfig
{
  std::size_t scenarios = 8;
  std::size_t min_agents = 2;
  std::size_t max_agents = 4;
  std::size_t targets = 1;
  std::size_t history = 8;
  std::size_t future = 12;
  double dt = 0.5;
  double min_speed = 2.0;
  double max_speed = 6.0;
  double min_radius = 15.0;
  double max_radius = 40.0;
  double min_lateral = 2.0;
  double max_lateral = 4.0;
  double constant_velocity_weight = 1.0;
  double constant_turn_weight = 1.0;
  double lane_change_weight = 1.0;
  double noise_std = 0.0;
  double spawn_radius = 30.0;
  /// Probability that a non-target history step (other than t = 0) is marked invalid.
  double dropout = 0.0;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const GenConfig & config);

/// Deterministic given (config, seed) on one platform.
std::vector<Scenario> generate_synthetic(const GenConfig & config, std::uint64_t seed);

}  // namespace freqtraj

#endif  // FREQTRAJ__SCENARIO_HPP_
