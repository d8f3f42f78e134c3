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

#ifndef FREQTRAJ__NN_HPP_
#define FREQTRAJ__NN_HPP_

#include "freqtraj/tensor.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace freqtraj
{

struct NamedParameter
{
  std::string name;
  Tensor value;
};

/// Owns every trainable tensor of a model in creation order, which is also the
/// checkpoint order. Initializers draw from one seeded engine, so creation order
/// fixes the initial values.
class ParameterStore
{
public:
  explicit ParameterStore(std::uint64_t seed) : rng_(seed) {}

  /// Uniform in +-sqrt(6 / fan_in).
  Tensor kaiming_uniform(const std::string & name, Shape shape, std::size_t fan_in);
  Tensor normal(const std::string & name, Shape shape, double stddev);
  Tensor constant(const std::string & name, Shape shape, double value);

  std::vector<NamedParameter> & parameters() { return params_; }
  const std::vector<NamedParameter> & parameters() const { return params_; }
  /// Throws std::out_of_range for unknown names.
  Tensor find(const std::string & name) const;
  std::size_t scalar_count() const;
  void zero_grad();

private:
  Tensor add(const std::string & name, Shape shape, std::vector<double> values);

  std::mt19937_64 rng_;
  std::vector<NamedParameter> params_;
};

/// y = x W + b with W stored [in, out].
struct Linear
{
  Tensor weight;
  Tensor bias;

  static Linear kaiming(ParameterStore & store, const std::string & name, std::size_t in, std::size_t out);
  static Linear zeros(ParameterStore & store, const std::string & name, std::size_t in, std::size_t out);

  std::size_t in_features() const { return weight.dim(0); }
  std::size_t out_features() const { return weight.dim(1); }
  Tensor operator()(const Tensor & x) const { return matmul(x, weight) + bias; }
};

struct LayerNorm
{
  Tensor gain;
  Tensor bias;

  static LayerNorm create(ParameterStore & store, const std::string & name, std::size_t width);
  Tensor operator()(const Tensor & x) const { return layer_norm(x, gain, bias); }
};

/// Two linear maps with a ReLU between.
struct Mlp
{
  Linear first;
  Linear second;

  static Mlp create(
    ParameterStore & store, const std::string & name, std::size_t in, std::size_t hidden, std::size_t out);
  Tensor operator()(const Tensor & x) const { return second(relu(first(x))); }
};

}  // namespace freqtraj

#endif  // FREQTRAJ__NN_HPP_
