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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "freqtraj/metrics.hpp"

#include <cmath>
#include <random>

using namespace freqtraj;

namespace
{

using Traj = Trajectory2<double>;

ForecastD make_forecast(std::vector<Traj> modes, std::vector<double> probs)
{
  ForecastD f;
  f.modes = std::move(modes);
  f.probabilities = std::move(probs);
  return f;
}

Traj offset(const Traj & t, double dx, double dy)
{
  Traj out = t;
  out.col(0).array() += dx;
  out.col(1).array() += dy;
  return out;
}

// Exhaustive scalar-loop metrics over all modes.
struct Brute
{
  double ade = 0.0;
  double fde = 0.0;
  double miss = 0.0;
  double bfde = 0.0;
};

Brute brute(const ForecastD & f, const Traj & gt, double threshold)
{
  Brute b;
  b.ade = INFINITY;
  b.fde = INFINITY;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < f.modes.size(); ++k) {
    double sum = 0.0;
    for (Eigen::Index t = 0; t < gt.rows(); ++t) {
      sum += std::hypot(f.modes[k](t, 0) - gt(t, 0), f.modes[k](t, 1) - gt(t, 1));
    }
    b.ade = std::min(b.ade, sum / double(gt.rows()));
    const Eigen::Index last = gt.rows() - 1;
    const double e = std::hypot(f.modes[k](last, 0) - gt(last, 0), f.modes[k](last, 1) - gt(last, 1));
    if (e < b.fde) {
      b.fde = e;
      arg = k;
    }
  }
  b.miss = b.fde > threshold ? 1.0 : 0.0;
  b.bfde = b.fde + (1.0 - f.probabilities[arg]) * (1.0 - f.probabilities[arg]);
  return b;
}

ForecastD random_forecast(std::mt19937_64 & rng, std::size_t k, Eigen::Index t)
{
  std::normal_distribution<double> n(0.0, 3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ForecastD f;
  double z = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    Traj m(t, 2);
    for (Eigen::Index r = 0; r < t; ++r) m(r, 0) = n(rng), m(r, 1) = n(rng);
    f.modes.push_back(m);
    f.probabilities.push_back(u(rng));
    z += f.probabilities.back();
  }
  for (auto & p : f.probabilities) p /= z;
  return f;
}

}  // namespace

TEST_CASE("minADE of an exact mode and of a constant offset")
{
  Traj gt(4, 2);
  gt << 0, 0, 1, 0.5, 2, 1, 3, 1.5;
  CHECK(min_ade(make_forecast({offset(gt, 3, 0), gt}, {0.5, 0.5}), gt) == 0.0);
  CHECK(min_ade(make_forecast({offset(gt, 0, 2)}, {1.0}), gt) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("minFDE and miss around the threshold")
{
  Traj gt(3, 2);
  gt << 0, 0, 1, 1, 2, 2;
  ForecastD hit = make_forecast({offset(gt, 5, 0), gt}, {0.5, 0.5});
  CHECK(min_fde(hit, gt) == 0.0);
  CHECK(miss(hit, gt, 2.0) == 0.0);
  ForecastD off = make_forecast({offset(gt, 3, 0), offset(gt, 0, -3)}, {0.5, 0.5});
  CHECK(miss(off, gt, 2.0) == 1.0);
  CHECK(miss(off, gt, 4.0) == 0.0);
}

TEST_CASE("brier-penalized minFDE")
{
  Traj gt(2, 2);
  gt << 0, 0, 1, 0;
  CHECK(b_min_fde(make_forecast({gt}, {1.0}), gt) == 0.0);
  CHECK(b_min_fde(make_forecast({offset(gt, 1, 0), offset(gt, 5, 0)}, {0.5, 0.5}), gt) == doctest::Approx(1.25));
  std::vector<Traj> five;
  for (int i = 0; i < 5; ++i) five.push_back(offset(gt, 0, 1.5 + i));
  CHECK(b_min_fde(make_forecast(five, std::vector<double>(5, 0.2)), gt) == doctest::Approx(1.5 + 0.64));
}

TEST_CASE("metrics equal the brute-force oracle on random forecasts")
{
  std::mt19937_64 rng(0);
  for (int trial = 0; trial < 500; ++trial) {
    ForecastD f = random_forecast(rng, 5, 6);
    Traj gt = random_forecast(rng, 1, 6).modes[0];
    const Brute b = brute(f, gt, 2.0);
    CHECK(std::abs(min_ade(f, gt) - b.ade) <= 1e-12);
    CHECK(std::abs(min_fde(f, gt) - b.fde) <= 1e-12);
    CHECK(miss(f, gt, 2.0) == b.miss);
    CHECK(std::abs(b_min_fde(f, gt) - b.bfde) <= 1e-12);
    CHECK(b_min_fde(f, gt) >= min_fde(f, gt));
  }
}

TEST_CASE("top-k keeps the most probable modes and scores are monotone in k")
{
  std::mt19937_64 rng(1);
  ForecastD f = make_forecast({Traj::Zero(2, 2), Traj::Ones(2, 2), Traj::Constant(2, 2, 2.0)}, {0.2, 0.5, 0.3});
  ForecastD two = top_k(f, 2);
  CHECK(two.probabilities == std::vector<double>{0.5, 0.3});
  CHECK(two.modes[0] == f.modes[1]);
  CHECK_THROWS(top_k(f, 0));
  CHECK_THROWS(top_k(f, 4));
  ForecastD tie = make_forecast({Traj::Zero(2, 2), Traj::Ones(2, 2)}, {0.5, 0.5});
  CHECK(top_k(tie, 1).modes[0] == tie.modes[0]);

  for (int trial = 0; trial < 300; ++trial) {
    ForecastD r = random_forecast(rng, 6, 5);
    Traj gt = random_forecast(rng, 1, 5).modes[0];
    for (std::size_t k = 1; k < 6; ++k) {
      TargetMetrics small = score_target(r, gt, k, 2.0);
      TargetMetrics big = score_target(r, gt, k + 1, 2.0);
      CHECK(big.min_ade <= small.min_ade);
      CHECK(big.min_fde <= small.min_fde);
    }
  }
}

TEST_CASE("aggregate averages targets")
{
  std::vector<TargetMetrics> t(2);
  t[0].min_ade = 1.0;
  t[1].min_ade = 3.0;
  t[1].miss = 1.0;
  MetricReport r = aggregate(t, 5, 2.0);
  CHECK(r.min_ade_k == 2.0);
  CHECK(r.miss_rate == 0.5);
  CHECK(r.targets == 2);
  const std::string text = format_report(r);
  CHECK(text.find("min_ade=2\n") != std::string::npos);
  CHECK(format_csv(t).rfind("scenario,target,min_ade,min_fde,miss,b_min_fde\n", 0) == 0);
}

TEST_CASE("metrics templates accept float forecasts")
{
  Forecast<float> f;
  Trajectory2<float> gt(2, 2);
  gt << 0.f, 0.f, 1.f, 0.f;
  Trajectory2<float> m = gt;
  m(1, 1) = 2.f;
  f.modes = {m};
  f.probabilities = {1.f};
  CHECK(min_fde(f, gt) == 2.f);
  CHECK(min_ade(f, gt) == 1.f);
}

TEST_CASE("mismatched horizons are rejected")
{
  ForecastD f = make_forecast({Traj::Zero(3, 2)}, {1.0});
  CHECK_THROWS(min_ade(f, Traj(Traj::Zero(4, 2))));
  CHECK_THROWS(min_ade(ForecastD{}, Traj(Traj::Zero(4, 2))));
}
