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

#include "freqtraj/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace freqtraj
{

Tensor ParameterStore::add(const std::string & name, Shape shape, std::vector<double> values)
{
  for (const auto & p : params_) {
    if (p.name == name) throw std::invalid_argument("duplicate parameter name: " + name);
  }
  Tensor t = Tensor::from(std::move(shape), std::move(values), true);
  params_.push_back({name, t});
  return t;
}

Tensor ParameterStore::kaiming_uniform(const std::string & name, Shape shape, std::size_t fan_in)
{
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> values(freqtraj::numel(shape));
  for (double & v : values) v = dist(rng_);
  return add(name, std::move(shape), std::move(values));
}

Tensor ParameterStore::normal(const std::string & name, Shape shape, double stddev)
{
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> values(freqtraj::numel(shape));
  for (double & v : values) v = dist(rng_);
  return add(name, std::move(shape), std::move(values));
}

Tensor ParameterStore::constant(const std::string & name, Shape shape, double value)
{
  std::vector<double> values(freqtraj::numel(shape), value);
  return add(name, std::move(shape), std::move(values));
}

Tensor ParameterStore::find(const std::string & name) const
{
  for (const auto & p : params_) {
    if (p.name == name) return p.value;
  }
  throw std::out_of_range("no parameter named " + name);
}

std::size_t ParameterStore::scalar_count() const
{
  std::size_t n = 0;
  for (const auto & p : params_) n += p.value.numel();
  return n;
}

void ParameterStore::zero_grad()
{
  for (auto & p : params_) p.value.zero_grad();
}

Linear Linear::kaiming(ParameterStore & store, const std::string & name, std::size_t in, std::size_t out)
{
  return {store.kaiming_uniform(name + ".weight", {in, out}, in), store.constant(name + ".bias", {out}, 0.0)};
}

Linear Linear::zeros(ParameterStore & store, const std::string & name, std::size_t in, std::size_t out)
{
  return {store.constant(name + ".weight", {in, out}, 0.0), store.constant(name + ".bias", {out}, 0.0)};
}

LayerNorm LayerNorm::create(ParameterStore & store, const std::string & name, std::size_t width)
{
  return {store.constant(name + ".gain", {width}, 1.0), store.constant(name + ".bias", {width}, 0.0)};
}

Mlp Mlp::create(
  ParameterStore & store, const std::string & name, std::size_t in, std::size_t hidden, std::size_t out)
{
  Linear first = Linear::kaiming(store, name + ".0", in, hidden);
  Linear second = Linear::kaiming(store, name + ".1", hidden, out);
  return {first, second};
}

}  // namespace freqtraj
