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

#ifndef FREQTRAJ_TESTS__REFERENCE_ATTENTION_HPP_
#define FREQTRAJ_TESTS__REFERENCE_ATTENTION_HPP_

// Scalar-loop reimplementation of the selective attention block, used as an
// independent oracle. It shares no code with the library besides reading parameters.

#include "freqtraj/attention.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace freqtraj::reference
{

using Mat = std::vector<std::vector<double>>;

inline Mat rows_of(const Tensor & t)  // [L, D] or [1, L, D]
{
  const std::size_t l = t.dim(-2);
  const std::size_t d = t.dim(-1);
  Mat m(l, std::vector<double>(d));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i][j] = t[i * d + j];
  return m;
}

inline Mat linear(const Mat & x, const Linear & lin)
{
  const std::size_t in = lin.in_features();
  const std::size_t out = lin.out_features();
  Mat y(x.size(), std::vector<double>(out));
  for (std::size_t r = 0; r < x.size(); ++r)
    for (std::size_t o = 0; o < out; ++o) {
      double s = lin.bias[o];
      for (std::size_t i = 0; i < in; ++i) s += x[r][i] * lin.weight[i * out + o];
      y[r][o] = s;
    }
  return y;
}

inline Mat relu(Mat x)
{
  for (auto & r : x)
    for (auto & v : r) v = v > 0.0 ? v : 0.0;
  return x;
}

inline Mat layer_norm(const Mat & x, const LayerNorm & ln)
{
  Mat y = x;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const std::size_t d = x[r].size();
    double mu = 0.0;
    for (double v : x[r]) mu += v;
    mu /= double(d);
    double var = 0.0;
    for (double v : x[r]) var += (v - mu) * (v - mu);
    var /= double(d);
    for (std::size_t j = 0; j < d; ++j) y[r][j] = (x[r][j] - mu) / std::sqrt(var + 1e-5) * ln.gain[j] + ln.bias[j];
  }
  return y;
}

struct Trace
{
  // [head][i][j]
  std::vector<Mat> dense;
  std::vector<Mat> sparse;
  Mat gate;
  Mat attended;
  Mat out;
};

/// `allowed[i][j]` false blocks key j for query i.
inline Trace attention(
  const SelectiveAttention & a, const Mat & queries, const Mat & context, const std::vector<std::vector<bool>> & allowed)
{
  const std::size_t lq = queries.size();
  const std::size_t lk = context.size();
  const std::size_t d = a.width;
  const std::size_t h = a.heads;
  const std::size_t dk = d / h;
  const Mat q = linear(queries, a.query);
  const Mat k = linear(context, a.key);
  const Mat v = linear(context, a.value);

  Trace t;
  t.gate.assign(lq, std::vector<double>(lk));
  for (std::size_t i = 0; i < lq; ++i)
    for (std::size_t j = 0; j < lk; ++j) {
      std::vector<double> pair(2 * d);
      for (std::size_t c = 0; c < d; ++c) {
        pair[c] = q[i][c];
        pair[d + c] = k[j][c];
      }
      const Mat hidden = relu(linear(Mat{pair}, a.gate_hidden));
      const double z = linear(hidden, a.gate_out)[0][0];
      t.gate[i][j] = 1.0 / (1.0 + std::exp(-z));
    }

  t.attended.assign(lq, std::vector<double>(d, 0.0));
  for (std::size_t head = 0; head < h; ++head) {
    Mat dense(lq, std::vector<double>(lk, 0.0));
    Mat sparse(lq, std::vector<double>(lk, 0.0));
    for (std::size_t i = 0; i < lq; ++i) {
      std::vector<double> s(lk);
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < lk; ++j) {
        double dot = 0.0;
        for (std::size_t c = 0; c < dk; ++c) dot += q[i][head * dk + c] * k[j][head * dk + c];
        s[j] = dot / std::sqrt(double(dk));
        if (allowed[i][j]) top = std::max(top, s[j]);
      }
      double z = 0.0;
      for (std::size_t j = 0; j < lk; ++j)
        if (allowed[i][j]) z += std::exp(s[j] - top);
      for (std::size_t j = 0; j < lk; ++j) {
        if (!allowed[i][j]) continue;
        dense[i][j] = std::exp(s[j] - top) / z;
        sparse[i][j] = s[j] > 0.0 ? s[j] * s[j] : 0.0;
      }
      for (std::size_t j = 0; j < lk; ++j) {
        const double w = t.gate[i][j] * dense[i][j] + (1.0 - t.gate[i][j]) * sparse[i][j];
        for (std::size_t c = 0; c < dk; ++c) t.attended[i][head * dk + c] += w * v[j][head * dk + c];
      }
    }
    t.dense.push_back(dense);
    t.sparse.push_back(sparse);
  }
  Mat proj = linear(t.attended, a.output);
  Mat res = queries;
  for (std::size_t i = 0; i < lq; ++i)
    for (std::size_t c = 0; c < d; ++c) res[i][c] += proj[i][c];
  t.out = layer_norm(res, a.norm);
  return t;
}

inline Mat block(
  const SelectiveAttentionBlock & b, const Mat & queries, const Mat & context,
  const std::vector<std::vector<bool>> & allowed)
{
  const Mat x = attention(b.attention, queries, context, allowed).out;
  const Mat f = linear(relu(linear(x, b.feed_forward.first)), b.feed_forward.second);
  Mat res = x;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t c = 0; c < x[i].size(); ++c) res[i][c] += f[i][c];
  return layer_norm(res, b.feed_forward_norm);
}

inline std::vector<std::vector<bool>> all_allowed(std::size_t lq, std::size_t lk)
{
  return std::vector<std::vector<bool>>(lq, std::vector<bool>(lk, true));
}

inline double max_diff(const Mat & a, const Tensor & t)
{
  double m = 0.0;
  const std::size_t d = a.front().size();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) m = std::max(m, std::abs(a[i][j] - t[i * d + j]));
  return m;
}

}  // namespace freqtraj::reference

#endif  // FREQTRAJ_TESTS__REFERENCE_ATTENTION_HPP_
