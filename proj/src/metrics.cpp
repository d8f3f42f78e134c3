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

#include "freqtraj/metrics.hpp"

#include <cstdio>
#include <sstream>

namespace freqtraj
{

namespace
{
std::string number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

TargetMetrics score_target(
  const ForecastD & forecast, const Trajectory2<double> & truth, std::size_t k, double miss_threshold)
{
  const ForecastD f = top_k(forecast, k);
  TargetMetrics m;
  m.min_ade = min_ade(f, truth);
  m.min_fde = min_fde(f, truth);
  m.miss = miss(f, truth, miss_threshold);
  m.b_min_fde = b_min_fde(f, truth);
  return m;
}

MetricReport aggregate(std::span<const TargetMetrics> targets, std::size_t k, double miss_threshold)
{
  MetricReport r;
  r.k = k;
  r.miss_threshold = miss_threshold;
  r.targets = targets.size();
  if (targets.empty()) return r;
  for (const auto & t : targets) {
    r.min_ade_k += t.min_ade;
    r.min_fde_k += t.min_fde;
    r.miss_rate += t.miss;
    r.b_min_fde += t.b_min_fde;
  }
  const double n = static_cast<double>(targets.size());
  r.min_ade_k /= n;
  r.min_fde_k /= n;
  r.miss_rate /= n;
  r.b_min_fde /= n;
  return r;
}

std::string format_report(const MetricReport & r)
{
  std::ostringstream os;
  os << "k=" << r.k << '\n'
     << "miss_threshold=" << number(r.miss_threshold) << '\n'
     << "targets=" << r.targets << '\n'
     << "min_ade=" << number(r.min_ade_k) << '\n'
     << "min_fde=" << number(r.min_fde_k) << '\n'
     << "miss_rate=" << number(r.miss_rate) << '\n'
     << "b_min_fde=" << number(r.b_min_fde) << '\n';
  return os.str();
}

std::string format_csv(std::span<const TargetMetrics> targets)
{
  std::ostringstream os;
  os << "scenario,target,min_ade,min_fde,miss,b_min_fde\n";
  for (const auto & t : targets) {
    os << t.scenario << ',' << t.target << ',' << number(t.min_ade) << ',' << number(t.min_fde) << ','
       << number(t.miss) << ',' << number(t.b_min_fde) << '\n';
  }
  return os.str();
}

}  // namespace freqtraj
