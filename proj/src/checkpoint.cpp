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

#include "freqtraj/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace freqtraj
{

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace
{
constexpr const char * kMagic = "freqtraj-checkpoint 1";

std::string expect_line(std::istream & in, const std::string & keyword)
{
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError("checkpoint truncated before '" + keyword + "'");
  if (line.rfind(keyword + " ", 0) != 0) throw CheckpointError("checkpoint: expected '" + keyword + "', got '" + line + "'");
  return line.substr(keyword.size() + 1);
}
}  // namespace

void save_checkpoint(const std::string & path, const TrajectoryModel & model, const Config & config, std::size_t step)
{
  const std::string cfg = serialize_config(config);
  const auto & params = model.parameters().parameters();
  std::ostringstream manifest;
  manifest << kMagic << '\n' << "step " << step << '\n' << "config " << cfg.size() << '\n' << cfg << '\n';
  manifest << "parameters " << params.size() << '\n';
  std::size_t offset = 0;
  for (const auto & p : params) {
    manifest << p.name << ' ' << p.value.rank();
    for (auto d : p.value.shape()) manifest << ' ' << d;
    manifest << ' ' << offset << ' ' << p.value.numel() << '\n';
    offset += p.value.numel() * sizeof(double);
  }
  manifest << "data " << offset << '\n';

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path);
  const std::string header = manifest.str();
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto & p : params) {
    out.write(reinterpret_cast<const char *>(p.value.data().data()),
              static_cast<std::streamsize>(p.value.numel() * sizeof(double)));
  }
  if (!out) throw CheckpointError("failed writing checkpoint " + path);
}

LoadedCheckpoint load_checkpoint(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw CheckpointError(path + " is not a freqtraj checkpoint");
  const std::size_t step = std::stoull(expect_line(in, "step"));
  const std::size_t cfg_bytes = std::stoull(expect_line(in, "config"));
  std::string cfg(cfg_bytes, '\0');
  in.read(cfg.data(), static_cast<std::streamsize>(cfg_bytes));
  std::getline(in, line);
  Config config = parse_config(cfg);

  struct Entry
  {
    std::string name;
    Shape shape;
    std::size_t offset;
    std::size_t count;
  };
  const std::size_t count = std::stoull(expect_line(in, "parameters"));
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw CheckpointError("checkpoint manifest truncated");
    std::istringstream row(line);
    Entry e;
    std::size_t rank = 0;
    row >> e.name >> rank;
    e.shape.resize(rank);
    for (auto & d : e.shape) row >> d;
    row >> e.offset >> e.count;
    if (!row) throw CheckpointError("bad manifest line: " + line);
    entries.push_back(std::move(e));
  }
  const std::size_t data_bytes = std::stoull(expect_line(in, "data"));
  std::vector<char> blob(data_bytes);
  in.read(blob.data(), static_cast<std::streamsize>(data_bytes));
  if (static_cast<std::size_t>(in.gcount()) != data_bytes) throw CheckpointError("checkpoint data truncated");

  LoadedCheckpoint loaded{config, step, TrajectoryModel(config.model, config.training.seed)};
  auto & params = loaded.model.parameters().parameters();
  if (params.size() != entries.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(entries.size()) + " tensors, model expects " +
                          std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Entry & e = entries[i];
    Tensor & t = params[i].value;
    if (e.name != params[i].name || e.shape != t.shape() || e.count != t.numel() ||
        e.offset + e.count * sizeof(double) > data_bytes) {
      throw CheckpointError("checkpoint tensor '" + e.name + "' " + to_string(e.shape) + " does not match '" +
                            params[i].name + "' " + to_string(t.shape()));
    }
    std::memcpy(t.mutable_data().data(), blob.data() + e.offset, e.count * sizeof(double));
  }
  return loaded;
}

}  // namespace freqtraj
