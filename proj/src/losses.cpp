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

#include "freqtraj/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace freqtraj
{

void LossWeights::validate() const
{
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) throw std::invalid_argument("loss weights must be nonnegative");
  if (alpha == 0.0 && beta == 0.0 && gamma == 0.0) throw std::invalid_argument("loss weights cannot all be zero");
}

namespace
{
void check_pair(const Tensor & trajectories, const Tensor & truth)
{
  const Shape & s = trajectories.shape();
  if (s.size() != 3 || s[2] != 2 || truth.shape() != Shape{s[1], 2}) {
    throw ShapeError("loss: trajectories " + to_string(s) + " vs truth " + to_string(truth.shape()));
  }
}
}  // namespace

std::size_t best_mode(const Tensor & trajectories, const Tensor & truth)
{
  check_pair(trajectories, truth);
  const std::size_t k = trajectories.dim(0);
  const std::size_t t = trajectories.dim(1);
  auto p = trajectories.data();
  auto g = truth.data();
  std::size_t best = 0;
  double best_error = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    double err = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
      const double dx = p[(m * t + i) * 2] - g[i * 2];
      const double dy = p[(m * t + i) * 2 + 1] - g[i * 2 + 1];
      err += std::sqrt(dx * dx + dy * dy);
    }
    err /= static_cast<double>(t);
    if (m == 0 || err < best_error) {
      best = m;
      best_error = err;
    }
  }
  return best;
}

RegressionLoss regression_loss(const Tensor & trajectories, const Tensor & truth)
{
  RegressionLoss r;
  r.best_mode = best_mode(trajectories, truth);
  Tensor winner = reshape(slice(trajectories, 0, r.best_mode, r.best_mode + 1), truth.shape());
  r.loss = mean(smooth_l1(winner - truth));
  return r;
}

Tensor classification_loss(const Tensor & probabilities, std::size_t best)
{
  if (probabilities.rank() != 1 || best >= probabilities.dim(0)) {
    throw ShapeError("classification_loss: mode " + std::to_string(best) + " for probabilities " +
                     to_string(probabilities.shape()));
  }
  return neg(reshape(log(slice(probabilities, 0, best, best + 1)), {}));
}

Tensor patchify_trajectory(const Tensor & trajectory, std::size_t patch_length)
{
  if (trajectory.rank() != 2 || trajectory.dim(1) != 2) {
    throw ShapeError("patchify_trajectory: expected [T,2], got " + to_string(trajectory.shape()));
  }
  const std::size_t t = trajectory.dim(0);
  if (patch_length == 0 || t % patch_length != 0) {
    throw std::invalid_argument(
      "patch length " + std::to_string(patch_length) + " does not divide horizon " + std::to_string(t));
  }
  return reshape(trajectory, {t / patch_length, patch_length, 2});
}

PatchLoss patch_loss(const Tensor & predicted, const Tensor & truth, std::size_t patch_length, double eps)
{
  if (predicted.shape() != truth.shape()) {
    throw ShapeError("patch_loss: " + to_string(predicted.shape()) + " vs " + to_string(truth.shape()));
  }
  // [M, P, 2] -> [2, M, P]: each coordinate is its own series.
  Tensor pred = permute(patchify_trajectory(predicted, patch_length), {2, 0, 1});
  Tensor gt = permute(patchify_trajectory(truth, patch_length), {2, 0, 1});
  const Shape full = pred.shape();

  Tensor mu_pred = mean(pred, -1, true);
  Tensor mu_gt = mean(gt, -1, true);
  Tensor dev_pred = pred - expand(mu_pred, full);
  Tensor dev_gt = gt - expand(mu_gt, full);
  Tensor sd_pred = sqrt(add_scalar(mean(square(dev_pred), -1), eps));
  Tensor sd_gt = sqrt(add_scalar(mean(square(dev_gt), -1), eps));
  Tensor covariance = mean(dev_pred * dev_gt, -1);

  PatchLoss out;
  out.corr = mean(1.0 - covariance / (sd_pred * sd_gt));
  Tensor log_p = log_softmax(dev_gt);
  Tensor log_q = log_softmax(dev_pred);
  out.var = mean(sum(exp(log_p) * (log_p - log_q), -1));
  out.mean = mean(abs(mu_gt - mu_pred));
  return out;
}

Tensor TargetLoss::total(const LossWeights & w) const
{
  return reg * w.alpha + cls * w.beta + patch() * w.gamma;
}

LossReport TargetLoss::report(const LossWeights & w) const
{
  LossReport r;
  r.reg = reg.item();
  r.cls = cls.item();
  r.corr = corr.item();
  r.var = var.item();
  r.mean = mean.item();
  r.patch = r.corr + r.var + r.mean;
  r.total = w.alpha * r.reg + w.beta * r.cls + w.gamma * r.patch;
  return r;
}

TargetLoss target_loss(const PredictionSet & prediction, const Tensor & truth, std::size_t patch_length)
{
  TargetLoss t;
  RegressionLoss reg = regression_loss(prediction.trajectories, truth);
  t.reg = reg.loss;
  t.best_mode = reg.best_mode;
  t.cls = classification_loss(prediction.probabilities, reg.best_mode);
  Tensor winner = reshape(slice(prediction.trajectories, 0, reg.best_mode, reg.best_mode + 1), truth.shape());
  PatchLoss p = patch_loss(winner, truth, patch_length);
  t.corr = p.corr;
  t.var = p.var;
  t.mean = p.mean;
  return t;
}

Tensor total_loss(std::span<const TargetLoss> targets, const LossWeights & w)
{
  if (targets.empty()) throw std::invalid_argument("total_loss: no targets");
  std::vector<Tensor> parts;
  parts.reserve(targets.size());
  for (const auto & t : targets) parts.push_back(reshape(t.total(w), {1}));
  return mean(concat(parts, 0));
}

LossReport average_report(std::span<const TargetLoss> targets, const LossWeights & w)
{
  LossReport avg;
  if (targets.empty()) return avg;
  for (const auto & t : targets) {
    const LossReport r = t.report(w);
    avg.reg += r.reg;
    avg.cls += r.cls;
    avg.corr += r.corr;
    avg.var += r.var;
    avg.mean += r.mean;
    avg.patch += r.patch;
    avg.total += r.total;
  }
  const double n = static_cast<double>(targets.size());
  avg.reg /= n;
  avg.cls /= n;
  avg.corr /= n;
  avg.var /= n;
  avg.mean /= n;
  avg.patch /= n;
  avg.total /= n;
  return avg;
}

}  // namespace freqtraj
