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

#ifndef FREQTRAJ__LOSSES_HPP_
#define FREQTRAJ__LOSSES_HPP_

#include "freqtraj/decoder.hpp"
#include "freqtraj/tensor.hpp"

#include <span>
#include <vector>

namespace freqtraj
{

struct LossWeights
{
  double alpha = 1.0;  // regression
  double beta = 0.5;   // classification
  double gamma = 0.5;  // patch structure

  /// Throws std::invalid_argument if any weight is negative or all are zero.
  void validate() const;
};

/// Scalar values of every loss component.
struct LossReport
{
  double reg = 0.0;
  double cls = 0.0;
  double corr = 0.0;
  double var = 0.0;
  double mean = 0.0;
  double patch = 0.0;
  double total = 0.0;
};

struct RegressionLoss
{
  Tensor loss;
  std::size_t best_mode = 0;
};

/// Index of the mode with the smallest average L2 distance to `truth` [T, 2];
/// ties go to the lowest index.
std::size_t best_mode(const Tensor & trajectories, const Tensor & truth);

/// Winner-take-all smooth-L1 between the best mode and the ground truth, averaged
/// over steps and coordinates. Only the best mode receives gradient.
RegressionLoss regression_loss(const Tensor & trajectories, const Tensor & truth);

/// -log p[best]; the mode choice itself carries no gradient.
Tensor classification_loss(const Tensor & probabilities, std::size_t best);

/// y[T, 2] -> [T / P, P, 2]; throws unless P divides T.
Tensor patchify_trajectory(const Tensor & trajectory, std::size_t patch_length);

struct PatchLoss
{
  Tensor corr;
  Tensor var;
  Tensor mean;
};

/// Patch-wise structure loss between a predicted and a ground-truth trajectory [T, 2].
/// Each coordinate is an independent series cut into consecutive patches; every term
/// is averaged over patches and coordinates.
///   corr: 1 - Pearson correlation per patch, std regularized as sqrt(var + eps)
///   var:  KL(softmax(gt - mean_gt) || softmax(pred - mean_pred)) over points of a patch
///   mean: |mean_gt - mean_pred|
PatchLoss patch_loss(const Tensor & predicted, const Tensor & truth, std::size_t patch_length, double eps = 1e-8);

/// Every component for one target, as taped scalars.
struct TargetLoss
{
  Tensor reg;
  Tensor cls;
  Tensor corr;
  Tensor var;
  Tensor mean;
  std::size_t best_mode = 0;

  Tensor patch() const { return corr + var + mean; }
  Tensor total(const LossWeights & w) const;
  LossReport report(const LossWeights & w) const;
};

/// Patch terms supervise the winning mode only.
TargetLoss target_loss(const PredictionSet & prediction, const Tensor & truth, std::size_t patch_length);

/// Weighted total averaged over targets.
Tensor total_loss(std::span<const TargetLoss> targets, const LossWeights & w);

LossReport average_report(std::span<const TargetLoss> targets, const LossWeights & w);

}  // namespace freqtraj

#endif  // FREQTRAJ__LOSSES_HPP_
