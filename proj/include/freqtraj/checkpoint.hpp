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

#ifndef FREQTRAJ__CHECKPOINT_HPP_
#define FREQTRAJ__CHECKPOINT_HPP_

#include "freqtraj/config.hpp"
#include "freqtraj/model.hpp"

#include <stdexcept>
#include <string>

namespace freqtraj
{

class CheckpointError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// File layout: a plain-text manifest followed by raw little-endian float64 data.
//
//   freqtraj-checkpoint 1
//   step <n>
//   config <bytes>
//   <config json, exactly <bytes> bytes>
//   parameters <count>
//   <name> <rank> <extent>... <byte offset> <value count>     (one line each)
//   data <bytes>
//   <binary blob>
//
// Offsets are relative to the first byte after the "data" line.

void save_checkpoint(const std::string & path, const TrajectoryModel & model, const Config & config, std::size_t step);

struct LoadedCheckpoint
{
  Config config;
  std::size_t step = 0;
  TrajectoryModel model;
};

/// Rebuilds the model from the stored config and overwrites every parameter;
/// names and shapes must match exactly.
LoadedCheckpoint load_checkpoint(const std::string & path);

}  // namespace freqtraj

#endif  // FREQTRAJ__CHECKPOINT_HPP_
