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

#ifndef FREQTRAJ__CONFIG_HPP_
#define FREQTRAJ__CONFIG_HPP_

#include "freqtraj/model.hpp"
#include "freqtraj/scenario.hpp"
#include "freqtraj/training.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace freqtraj
{

/// Raised for invalid configuration; `key()` is the dotted path of the offending entry.
class ConfigError : public std::invalid_argument
{
public:
  ConfigError(std::string key, const std::string & what)
  : std::invalid_argument(key + ": " + what), key_(std::move(key))
  {
  }
  const std::string & key() const { return key_; }

private:
  std::string key_;
};

struct DataConfig
{
  std::string train_path;  // scenario file; empty means synthetic
  GenConfig synthetic;
  std::uint64_t synthetic_seed = 0;
};

struct Config
{
  ModelConfig model;
  TrainConfig training;
  DataConfig data;

  /// Cross-checks every section; throws ConfigError.
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys and wrong types are rejected.
Config parse_config(const std::string & json_text);
Config load_config(const std::string & path);
std::string serialize_config(const Config & config);

}  // namespace freqtraj

#endif  // FREQTRAJ__CONFIG_HPP_
