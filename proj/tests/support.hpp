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

#ifndef FREQTRAJ_TESTS__SUPPORT_HPP_
#define FREQTRAJ_TESTS__SUPPORT_HPP_

#include "freqtraj/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace freqtraj::testing
{

inline Tensor random_tensor(Shape shape, std::mt19937_64 & rng, double scale = 1.0, bool requires_grad = false)
{
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> v(numel(shape));
  for (auto & x : v) x = dist(rng);
  return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

inline double max_abs_diff(const Tensor & a, const Tensor & b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool bitwise_equal(const Tensor & a, const Tensor & b)
{
  if (a.shape() != b.shape()) return false;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace freqtraj::testing

#endif  // FREQTRAJ_TESTS__SUPPORT_HPP_
