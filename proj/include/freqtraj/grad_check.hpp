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

#ifndef FREQTRAJ__GRAD_CHECK_HPP_
#define FREQTRAJ__GRAD_CHECK_HPP_

#include "freqtraj/tensor.hpp"

#include <functional>
#include <span>
#include <vector>

namespace freqtraj
{

struct GradCheckReport
{
  double max_error = 0.0;
  /// One entry per checked tensor, in input order.
  std::vector<double> per_tensor;
};

/// Compares tape gradients against central finite differences.
///
/// The error for one coordinate is |analytic - numeric| / max(1, |analytic|, |numeric|);
/// the report keeps the maximum per tensor and overall. `loss` is re-evaluated
/// 2 * (total coordinates) + 1 times; every tensor in `inputs` must be a leaf
/// that requires gradients.
GradCheckReport grad_check_report(
  const std::function<Tensor()> & loss, std::span<Tensor> inputs, double step = 1e-6);

double grad_check(const std::function<Tensor()> & loss, std::span<Tensor> inputs, double step = 1e-6);
double grad_check(const std::function<Tensor(const Tensor &)> & f, Tensor x, double step = 1e-6);

}  // namespace freqtraj

#endif  // FREQTRAJ__GRAD_CHECK_HPP_
