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

#include "freqtraj/config.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace freqtraj
{

using json = nlohmann::json;

namespace
{

// Visits a JSON object, dispatching each known key and rejecting the rest.
class Section
{
public:
  Section(const json & node, std::string path) : node_(node), path_(std::move(path))
  {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  template <typename T>
  Section & read(const std::string & key, T & out)
  {
    handlers_[key] = [this, key, &out](const json & v) {
      try {
        if constexpr (std::is_same_v<T, bool>) {
          if (!v.is_boolean()) throw ConfigError(sub(key), "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
            throw ConfigError(sub(key), "expected a non-negative integer");
          }
        } else if constexpr (std::is_floating_point_v<T>) {
          if (!v.is_number()) throw ConfigError(sub(key), "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!v.is_string()) throw ConfigError(sub(key), "expected a string");
        }
        out = v.get<T>();
      } catch (const json::exception & e) {
        throw ConfigError(sub(key), e.what());
      }
    };
    return *this;
  }

  Section & nested(const std::string & key, std::function<void(const json &, const std::string &)> fn)
  {
    handlers_[key] = [this, key, fn](const json & v) { fn(v, sub(key)); };
    return *this;
  }

  void run()
  {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      auto h = handlers_.find(it.key());
      if (h == handlers_.end()) throw ConfigError(sub(it.key()), "unknown key");
      h->second(it.value());
    }
  }

private:
  std::string sub(const std::string & key) const { return path_.empty() ? key : path_ + "." + key; }

  const json & node_;
  std::string path_;
  std::map<std::string, std::function<void(const json &)>> handlers_;
};

void read_granularities(const json & v, const std::string & path, std::vector<Granularity> & out)
{
  if (!v.is_array()) throw ConfigError(path, "expected an array of {window, stride}");
  out.clear();
  for (std::size_t i = 0; i < v.size(); ++i) {
    Granularity g;
    Section(v[i], path + "[" + std::to_string(i) + "]").read("window", g.window).read("stride", g.stride).run();
    out.push_back(g);
  }
}

void read_gen(const json & v, const std::string & path, GenConfig & g)
{
  Section(v, path)
    .read("scenarios", g.scenarios)
    .read("min_agents", g.min_agents)
    .read("max_agents", g.max_agents)
    .read("targets", g.targets)
    .read("history", g.history)
    .read("future", g.future)
    .read("dt", g.dt)
    .read("min_speed", g.min_speed)
    .read("max_speed", g.max_speed)
    .read("min_radius", g.min_radius)
    .read("max_radius", g.max_radius)
    .read("min_lateral", g.min_lateral)
    .read("max_lateral", g.max_lateral)
    .read("constant_velocity_weight", g.constant_velocity_weight)
    .read("constant_turn_weight", g.constant_turn_weight)
    .read("lane_change_weight", g.lane_change_weight)
    .read("noise_std", g.noise_std)
    .read("spawn_radius", g.spawn_radius)
    .read("dropout", g.dropout)
    .run();
}

}  // namespace

void Config::validate() const
{
  try {
    model.validate();
  } catch (const std::invalid_argument & e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(msg.substr(0, colon), colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
  try {
    training.validate();
  } catch (const std::invalid_argument & e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(msg.substr(0, colon), colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
  if (data.train_path.empty()) {
    try {
      freqtraj::validate(data.synthetic);
    } catch (const std::invalid_argument & e) {
      throw ConfigError("data.synthetic", e.what());
    }
    if (data.synthetic.history != model.history) {
      throw ConfigError("data.synthetic.history", "must equal model.history");
    }
    if (data.synthetic.future != model.future) {
      throw ConfigError("data.synthetic.future", "must equal model.future");
    }
  }
}

Config parse_config(const std::string & json_text)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error & e) {
    throw ConfigError("(root)", std::string("not valid JSON: ") + e.what());
  }
  Config c;
  Section(doc, "")
    .nested(
      "model",
      [&](const json & v, const std::string & path) {
        ModelConfig & m = c.model;
        Section(v, path)
          .read("history", m.history)
          .read("future", m.future)
          .read("hidden", m.hidden)
          .read("patch_hidden", m.patch_hidden)
          .read("heads", m.heads)
          .read("modes", m.modes)
          .read("refinement_rounds", m.refinement_rounds)
          .read("experts", m.experts)
          .nested("granularities", [&](const json & g, const std::string & p) { read_granularities(g, p, m.granularities); })
          .read("loss_patch", m.loss_patch)
          .read("position_scale", m.position_scale)
          .run();
      })
    .nested(
      "training",
      [&](const json & v, const std::string & path) {
        TrainConfig & t = c.training;
        Section(v, path)
          .read("steps", t.steps)
          .read("learning_rate", t.learning_rate)
          .read("batch_size", t.batch_size)
          .read("seed", t.seed)
          .nested(
            "weights",
            [&](const json & w, const std::string & p) {
              Section(w, p).read("alpha", t.weights.alpha).read("beta", t.weights.beta).read("gamma", t.weights.gamma).run();
            })
          .run();
      })
    .nested(
      "data",
      [&](const json & v, const std::string & path) {
        Section(v, path)
          .read("train_path", c.data.train_path)
          .read("synthetic_seed", c.data.synthetic_seed)
          .nested("synthetic", [&](const json & g, const std::string & p) { read_gen(g, p, c.data.synthetic); })
          .run();
      })
    .run();
  // Synthetic horizons follow the model unless given explicitly.
  auto explicit_gen_key = [&](const char * key) {
    return doc.contains("data") && doc["data"].contains("synthetic") && doc["data"]["synthetic"].contains(key);
  };
  if (!explicit_gen_key("history")) c.data.synthetic.history = c.model.history;
  if (!explicit_gen_key("future")) c.data.synthetic.future = c.model.future;
  c.validate();
  return c;
}

Config load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const Config & c)
{
  json granularities = json::array();
  for (const auto & g : c.model.granularities) granularities.push_back({{"window", g.window}, {"stride", g.stride}});
  const GenConfig & g = c.data.synthetic;
  json doc = {
    {"model",
     {{"history", c.model.history},
      {"future", c.model.future},
      {"hidden", c.model.hidden},
      {"patch_hidden", c.model.patch_hidden},
      {"heads", c.model.heads},
      {"modes", c.model.modes},
      {"refinement_rounds", c.model.refinement_rounds},
      {"experts", c.model.experts},
      {"granularities", granularities},
      {"loss_patch", c.model.loss_patch},
      {"position_scale", c.model.position_scale}}},
    {"training",
     {{"steps", c.training.steps},
      {"learning_rate", c.training.learning_rate},
      {"batch_size", c.training.batch_size},
      {"seed", c.training.seed},
      {"weights", {{"alpha", c.training.weights.alpha}, {"beta", c.training.weights.beta}, {"gamma", c.training.weights.gamma}}}}},
    {"data",
     {{"train_path", c.data.train_path},
      {"synthetic_seed", c.data.synthetic_seed},
      {"synthetic",
       {{"scenarios", g.scenarios},
        {"min_agents", g.min_agents},
        {"max_agents", g.max_agents},
        {"targets", g.targets},
        {"history", g.history},
        {"future", g.future},
        {"dt", g.dt},
        {"min_speed", g.min_speed},
        {"max_speed", g.max_speed},
        {"min_radius", g.min_radius},
        {"max_radius", g.max_radius},
        {"min_lateral", g.min_lateral},
        {"max_lateral", g.max_lateral},
        {"constant_velocity_weight", g.constant_velocity_weight},
        {"constant_turn_weight", g.constant_turn_weight},
        {"lane_change_weight", g.lane_change_weight},
        {"noise_std", g.noise_std},
        {"spawn_radius", g.spawn_radius},
        {"dropout", g.dropout}}}}}};
  return doc.dump(2);
}

}  // namespace freqtraj
