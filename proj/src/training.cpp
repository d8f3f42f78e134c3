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

#include "freqtraj/training.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace freqtraj
{

Adam::Adam(std::vector<NamedParameter> & params, Options options) : params_(params), options_(options)
{
  for (const auto & p : params_) {
    m_.emplace_back(p.value.numel(), 0.0);
    v_.emplace_back(p.value.numel(), 0.0);
  }
}

void Adam::step()
{
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor & p = params_[i].value;
    if (!p.has_grad()) continue;
    auto g = p.grad();
    auto w = p.mutable_data();
    auto & m = m_[i];
    auto & v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = options_.beta1 * m[j] + (1.0 - options_.beta1) * g[j];
      v[j] = options_.beta2 * v[j] + (1.0 - options_.beta2) * g[j] * g[j];
      w[j] -= options_.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + options_.eps);
    }
  }
}

void TrainConfig::validate() const
{
  if (!(learning_rate > 0.0)) throw std::invalid_argument("training.learning_rate: must be positive");
  if (batch_size == 0) throw std::invalid_argument("training.batch_size: must be positive");
  try {
    weights.validate();
  } catch (const std::invalid_argument & e) {
    throw std::invalid_argument(std::string("training.weights: ") + e.what());
  }
}

std::vector<TrainingSample> make_samples(std::span<const Scenario> scenarios)
{
  std::vector<TrainingSample> out;
  for (const auto & s : scenarios) {
    NormalizedScenario n = normalize(s);
    for (auto & view : n.views) {
      Tensor truth = target_future(view);
      out.push_back({s.id, std::move(view), truth});
    }
  }
  return out;
}

std::vector<TargetLoss> sample_losses(const TrajectoryModel & model, std::span<const TrainingSample> samples)
{
  std::vector<TargetLoss> losses;
  losses.reserve(samples.size());
  for (const auto & s : samples) {
    losses.push_back(target_loss(model.forward(s.view), s.truth, model.config().loss_patch));
  }
  return losses;
}

LossReport dataset_loss(const TrajectoryModel & model, std::span<const TrainingSample> samples, const LossWeights & w)
{
  NoGradGuard no_grad;
  const auto losses = sample_losses(model, samples);
  return average_report(losses, w);
}

std::vector<LogEntry> train(
  TrajectoryModel & model, std::span<const Scenario> scenarios, const TrainConfig & config,
  const std::function<void(const LogEntry &)> & on_step)
{
  config.validate();
  if (scenarios.empty()) throw std::invalid_argument("train: no scenarios");
  std::vector<std::vector<TrainingSample>> per_scenario;
  for (const auto & s : scenarios) per_scenario.push_back(make_samples(std::span<const Scenario>(&s, 1)));

  auto & params = model.parameters().parameters();
  Adam optimizer(params, {config.learning_rate});
  std::vector<LogEntry> log;
  log.reserve(config.steps);
  for (std::size_t step = 0; step < config.steps; ++step) {
    std::vector<TrainingSample> batch;
    for (std::size_t i = 0; i < config.batch_size; ++i) {
      const auto & group = per_scenario[(step * config.batch_size + i) % per_scenario.size()];
      batch.insert(batch.end(), group.begin(), group.end());
    }
    if (batch.empty()) throw std::invalid_argument("train: batch contains no targets");
    model.parameters().zero_grad();
    const auto losses = sample_losses(model, batch);
    LogEntry entry{step, average_report(losses, config.weights)};
    total_loss(losses, config.weights).backward();
    optimizer.step();
    if (on_step) on_step(entry);
    log.push_back(entry);
  }
  return log;
}

std::string format_log_header() { return "step,reg,cls,corr,var,mean,patch,total"; }

std::string format_log_line(const LogEntry & e)
{
  char buf[512];
  const LossReport & l = e.loss;
  std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", e.step, l.reg, l.cls, l.corr,
                l.var, l.mean, l.patch, l.total);
  return buf;
}

}  // namespace freqtraj
