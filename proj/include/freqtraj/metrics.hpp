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

#ifndef FREQTRAJ__METRICS_HPP_
#define FREQTRAJ__METRICS_HPP_

#include "freqtraj/decoder.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqtraj
{

template <typename Scalar>
using Trajectory2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Derived, typename OtherDerived>
typename Derived::Scalar average_displacement(
  const Eigen::MatrixBase<Derived> & a, const Eigen::MatrixBase<OtherDerived> & b)
{
  return (a - b).rowwise().norm().mean();
}

template <typename Derived, typename OtherDerived>
typename Derived::Scalar final_displacement(
  const Eigen::MatrixBase<Derived> & a, const Eigen::MatrixBase<OtherDerived> & b)
{
  return (a.row(a.rows() - 1) - b.row(b.rows() - 1)).norm();
}

namespace detail
{
template <typename Scalar>
void check_forecast(const Forecast<Scalar> & f, const Trajectory2<Scalar> & truth)
{
  if (f.modes.empty()) throw std::invalid_argument("metrics: forecast has no modes");
  for (const auto & m : f.modes) {
    if (m.rows() != truth.rows() || m.rows() == 0) {
      throw std::invalid_argument(
        "metrics: mode with " + std::to_string(m.rows()) + " steps vs truth with " + std::to_string(truth.rows()));
    }
  }
}
}  // namespace detail

template <typename Scalar>
Scalar min_ade(const Forecast<Scalar> & f, const Trajectory2<Scalar> & truth)
{
  detail::check_forecast(f, truth);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const auto & m : f.modes) best = std::min(best, average_displacement(m, truth));
  return best;
}

/// Mode with the closest endpoint; ties go to the lowest index.
template <typename Scalar>
std::size_t endpoint_best_mode(const Forecast<Scalar> & f, const Trajectory2<Scalar> & truth)
{
  detail::check_forecast(f, truth);
  std::size_t best = 0;
  Scalar best_error = std::numeric_limits<Scalar>::infinity();
  for (std::size_t k = 0; k < f.modes.size(); ++k) {
    const Scalar e = final_displacement(f.modes[k], truth);
    if (e < best_error) {
      best_error = e;
      best = k;
    }
  }
  return best;
}

template <typename Scalar>
Scalar min_fde(const Forecast<Scalar> & f, const Trajectory2<Scalar> & truth)
{
  return final_displacement(f.modes[endpoint_best_mode(f, truth)], truth);
}

/// 1 when the best endpoint lies farther than `threshold` meters from the truth.
template <typename Scalar>
Scalar miss(const Forecast<Scalar> & f, const Trajectory2<Scalar> & truth, Scalar threshold)
{
  return min_fde(f, truth) > threshold ? Scalar(1) : Scalar(0);
}

/// minFDE plus (1 - p)^2, p the probability of the endpoint-best mode.
template <typename Scalar>
Scalar b_min_fde(const Forecast<Scalar> & f, const Trajectory2<Scalar> & truth)
{
  const std::size_t k = endpoint_best_mode(f, truth);
  if (f.probabilities.size() != f.modes.size()) throw std::invalid_argument("metrics: probability count mismatch");
  const Scalar gap = Scalar(1) - f.probabilities[k];
  return final_displacement(f.modes[k], truth) + gap * gap;
}

/// The `k` most probable modes, most probable first; ties keep the original order.
/// Probabilities are kept as they are (not renormalized).
template <typename Scalar>
Forecast<Scalar> top_k(const Forecast<Scalar> & f, std::size_t k)
{
  if (k == 0 || k > f.modes.size()) {
    throw std::invalid_argument(
      "k=" + std::to_string(k) + " but the forecast has " + std::to_string(f.modes.size()) + " modes");
  }
  std::vector<std::size_t> order(f.modes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f.probabilities[a] > f.probabilities[b];
  });
  Forecast<Scalar> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.modes.push_back(f.modes[order[i]]);
    out.probabilities.push_back(f.probabilities[order[i]]);
  }
  return out;
}

struct TargetMetrics
{
  std::string scenario;
  std::size_t target = 0;
  double min_ade = 0.0;
  double min_fde = 0.0;
  double miss = 0.0;
  double b_min_fde = 0.0;
};

struct MetricReport
{
  std::size_t k = 0;
  double miss_threshold = 2.0;
  std::size_t targets = 0;
  double min_ade_k = 0.0;
  double min_fde_k = 0.0;
  double miss_rate = 0.0;
  double b_min_fde = 0.0;
};

TargetMetrics score_target(
  const ForecastD & forecast, const Trajectory2<double> & truth, std::size_t k, double miss_threshold);

/// Means over targets, accumulated in input order.
MetricReport aggregate(std::span<const TargetMetrics> targets, std::size_t k, double miss_threshold);

/// Line-oriented key=value text.
std::string format_report(const MetricReport & report);
std::string format_csv(std::span<const TargetMetrics> targets);

}  // namespace freqtraj

#endif  // FREQTRAJ__METRICS_HPP_
