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

#include "freqtraj/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace freqtraj
{

GradCheckReport grad_check_report(
  const std::function<Tensor()> & loss, std::span<Tensor> inputs, double step)
{
  for (auto & t : inputs) {
    if (!t.is_leaf() || !t.requires_grad()) {
      throw std::invalid_argument("grad_check: inputs must be leaves that require gradients");
    }
    t.zero_grad();
  }
  loss().backward();

  GradCheckReport report;
  NoGradGuard no_grad;
  for (auto & t : inputs) {
    std::vector<double> analytic(t.numel(), 0.0);
    if (t.has_grad()) std::copy(t.grad().begin(), t.grad().end(), analytic.begin());
    auto values = t.mutable_data();
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      // Divide by the perturbation actually stored, not the nominal one.
      const double hi = saved + step;
      const double lo = saved - step;
      values[i] = hi;
      const double plus = loss().item();
      values[i] = lo;
      const double minus = loss().item();
      values[i] = saved;
      const double numeric = (plus - minus) / (hi - lo);
      const double scale = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric)});
      worst = std::max(worst, std::fabs(analytic[i] - numeric) / scale);
    }
    report.per_tensor.push_back(worst);
    report.max_error = std::max(report.max_error, worst);
  }
  return report;
}

double grad_check(const std::function<Tensor()> & loss, std::span<Tensor> inputs, double step)
{
  return grad_check_report(loss, inputs, step).max_error;
}

double grad_check(const std::function<Tensor(const Tensor &)> & f, Tensor x, double step)
{
  Tensor inputs[] = {x};
  return grad_check([&]() { return f(x); }, inputs, step);
}

}  // namespace freqtraj
