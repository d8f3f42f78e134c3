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

#include "freqtraj/attention.hpp"
#include "freqtraj/grad_check.hpp"
#include "reference_attention.hpp"
#include "support.hpp"

#include <cmath>

using namespace freqtraj;
using freqtraj::testing::bitwise_equal;
using freqtraj::testing::max_abs_diff;
using freqtraj::testing::random_tensor;
namespace ref = freqtraj::reference;

namespace
{

void set_identity(Linear & lin)
{
  auto w = lin.weight.mutable_data();
  const std::size_t n = lin.in_features();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (i / n == i % n) ? 1.0 : 0.0;
  for (double & b : lin.bias.mutable_data()) b = 0.0;
}

void force_gate(SelectiveAttention & a, double logit)
{
  for (double & w : a.gate_out.weight.mutable_data()) w = 0.0;
  a.gate_out.bias.mutable_data()[0] = logit;
}

void randomize_biases(ParameterStore & store, std::mt19937_64 & rng)
{
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto & p : store.parameters()) {
    if (p.value.rank() == 1) {
      for (double & v : p.value.mutable_data()) v += n(rng);
    }
  }
}

}  // namespace

TEST_CASE("two positions, one head, gate fixed at one half")
{
  ParameterStore store(0);
  SelectiveAttention a = SelectiveAttention::create(store, "a", 2, 1);
  set_identity(a.query);
  set_identity(a.key);
  set_identity(a.value);
  set_identity(a.output);
  force_gate(a, 0.0);

  Tensor x = Tensor::from({1, 2, 2}, {1, 0, 0, 2});
  auto r = a.forward(x, x, std::nullopt);
  // Scores X X^T / sqrt(2) = [[1, 0], [0, 4]] / sqrt(2).
  const double s00 = 1.0 / std::sqrt(2.0);
  const double s11 = 4.0 / std::sqrt(2.0);
  const double d00 = std::exp(s00) / (std::exp(s00) + 1.0);
  const double d01 = 1.0 - d00;
  const double d11 = std::exp(s11) / (std::exp(s11) + 1.0);
  const double d10 = 1.0 - d11;
  const double a00 = 0.5 * d00 + 0.5 * s00 * s00;
  const double a01 = 0.5 * d01;
  const double a10 = 0.5 * d10;
  const double a11 = 0.5 * d11 + 0.5 * s11 * s11;
  for (double g : r.scores.gate.data()) CHECK(g == 0.5);
  CHECK(r.scores.blended.at({0, 0, 0, 0}) == doctest::Approx(a00).epsilon(1e-14));
  CHECK(r.scores.blended.at({0, 0, 1, 1}) == doctest::Approx(a11).epsilon(1e-14));
  // Values are the inputs: row i of the output is [a_i0 * 1, a_i1 * 2].
  CHECK(r.attended.at({0, 0, 0}) == doctest::Approx(a00).epsilon(1e-14));
  CHECK(r.attended.at({0, 0, 1}) == doctest::Approx(2.0 * a01).epsilon(1e-14));
  CHECK(r.attended.at({0, 1, 0}) == doctest::Approx(a10).epsilon(1e-14));
  CHECK(r.attended.at({0, 1, 1}) == doctest::Approx(2.0 * a11).epsilon(1e-14));
  // Residual plus layer norm over two features maps each row to (+-1, -+1) scaled.
  for (std::size_t i = 0; i < 2; ++i) {
    const double u = x.at({0, i, 0}) + r.attended.at({0, i, 0});
    const double w = x.at({0, i, 1}) + r.attended.at({0, i, 1});
    const double half = (u - w) / 2.0;
    const double expected = half / std::sqrt(half * half + 1e-5);
    CHECK(r.out.at({0, i, 0}) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.out.at({0, i, 1}) == doctest::Approx(-expected).epsilon(1e-12));
  }
}

TEST_CASE("saturated gate selects one of the two paths")
{
  ParameterStore store(1);
  std::mt19937_64 rng(1);
  SelectiveAttention a = SelectiveAttention::create(store, "a", 8, 2);
  Tensor q = random_tensor({1, 4, 8}, rng);
  Tensor c = random_tensor({1, 5, 8}, rng);

  force_gate(a, 1000.0);
  auto dense = a.forward(q, c, std::nullopt);
  auto tr = ref::attention(a, ref::rows_of(q), ref::rows_of(c), ref::all_allowed(4, 5));
  CHECK(max_abs_diff(dense.scores.blended, dense.scores.dense) <= 1e-9);
  // Vanilla softmax attention: attended = softmax(QK^T / sqrt(dk)) V per head.
  ref::Mat vanilla(4, std::vector<double>(8, 0.0));
  const ref::Mat v = ref::linear(ref::rows_of(c), a.value);
  for (std::size_t h = 0; h < 2; ++h)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t d = 0; d < 4; ++d) vanilla[i][h * 4 + d] += tr.dense[h][i][j] * v[j][h * 4 + d];
  CHECK(ref::max_diff(vanilla, dense.attended) <= 1e-9);

  force_gate(a, -1000.0);
  auto sparse = a.forward(q, c, std::nullopt);
  CHECK(max_abs_diff(sparse.scores.blended, sparse.scores.sparse) <= 1e-9);
}

TEST_CASE("closed gate with negative scores attends to nothing")
{
  ParameterStore store(2);
  SelectiveAttention a = SelectiveAttention::create(store, "a", 4, 1);
  // Keys are the negated queries and all inputs point the same way, so q_i . k_j < 0.
  auto kw = a.key.weight.mutable_data();
  auto qw = a.query.weight.data();
  for (std::size_t i = 0; i < kw.size(); ++i) kw[i] = -qw[i];
  for (double & b : a.query.bias.mutable_data()) b = 0.0;
  for (double & b : a.key.bias.mutable_data()) b = 0.0;
  force_gate(a, -1000.0);
  Tensor x = Tensor::from({1, 3, 4}, {1, 2, 3, 4, 0.5, 1, 1.5, 2, 2, 4, 6, 8});
  auto r = a.forward(x, x, std::nullopt);
  for (double v : r.attended.data()) CHECK(v == 0.0);
  Tensor residual_only = a.norm(x + a.output.bias);
  CHECK(max_abs_diff(r.out, residual_only) <= 1e-12);
}

TEST_CASE("scores satisfy their range contracts and the blend decomposition")
{
  ParameterStore store(3);
  std::mt19937_64 rng(3);
  SelectiveAttention a = SelectiveAttention::create(store, "a", 8, 4);
  randomize_biases(store, rng);
  Tensor x = random_tensor({2, 6, 8}, rng);
  const CausalMask causal = CausalMask::with_summary_token(6);
  Tensor mask = key_padding_mask({{true, true, false, true, true, true}, std::vector<bool>(6, true)}, 6, &causal);
  auto r = a.forward(x, x, mask);
  const auto & s = r.scores;
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t h = 0; h < 4; ++h)
      for (std::size_t i = 0; i < 6; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
          const double d = s.dense.at({b, h, i, j});
          const double sp = s.sparse.at({b, h, i, j});
          const double g = s.gate.at({b, i, j});
          CHECK(d >= 0.0);
          CHECK(sp >= 0.0);
          CHECK(g > 0.0);
          CHECK(g < 1.0);
          CHECK(std::abs(s.blended.at({b, h, i, j}) - (g * d + (1.0 - g) * sp)) <= 1e-12);
          if (mask.at({b, i, j}) != 0.0) {
            CHECK(d == 0.0);
            CHECK(sp == 0.0);
          }
          row += d;
        }
        CHECK(std::abs(row - 1.0) <= 1e-12);
      }
}

TEST_CASE("summary-token mask pattern")
{
  CausalMask m = CausalMask::with_summary_token(4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(m.allows(0, k));
  CHECK(m.allows(2, 0));
  CHECK(m.allows(2, 2));
  CHECK_FALSE(m.allows(2, 3));
  CHECK_FALSE(m.allows(1, 2));
}

TEST_CASE("tsam outputs before a perturbed patch are unchanged")
{
  ParameterStore store(4);
  std::mt19937_64 rng(4);
  SelectiveAttentionBlock block = SelectiveAttentionBlock::create(store, "t", 8, 2);
  randomize_biases(store, rng);
  Tensor seq = random_tensor({1, 6, 8}, rng);
  Tensor base = tsam(block, seq);
  for (std::size_t j = 1; j < 6; ++j) {
    Tensor moved = seq.clone();
    for (std::size_t c = 0; c < 8; ++c) moved.mutable_data()[j * 8 + c] += 3.0;
    Tensor out = tsam(block, moved);
    for (std::size_t i = 1; i < j; ++i) {
      CHECK(bitwise_equal(slice(out, 1, i, i + 1), slice(base, 1, i, i + 1)));
    }
    CHECK(max_abs_diff(slice(out, 1, 0, 1), slice(base, 1, 0, 1)) > 0.0);
  }
}

TEST_CASE("tsam with one patch reads only the token and that patch")
{
  ParameterStore store(5);
  std::mt19937_64 rng(5);
  SelectiveAttentionBlock block = SelectiveAttentionBlock::create(store, "t", 4, 1);
  Tensor seq = random_tensor({1, 2, 4}, rng);
  Tensor out = tsam(block, seq);
  CHECK(out.shape() == Shape{1, 2, 4});
  const ref::Mat rows = ref::rows_of(seq);
  const ref::Mat expected = ref::block(block, rows, rows, {{true, true}, {true, true}});
  CHECK(ref::max_diff(expected, out) <= 1e-9);
}

TEST_CASE("full block matches the loop recomputation under a causal padded mask")
{
  ParameterStore store(6);
  std::mt19937_64 rng(6);
  SelectiveAttentionBlock block = SelectiveAttentionBlock::create(store, "t", 8, 4);
  randomize_biases(store, rng);
  Tensor seq = random_tensor({1, 5, 8}, rng);
  std::vector<std::vector<bool>> patch_valid{{true, false, true, true}};
  Tensor out = tsam(block, seq, patch_valid);

  std::vector<std::vector<bool>> allowed(5, std::vector<bool>(5));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) allowed[i][j] = (i == 0 || j <= i) && (j == 0 || patch_valid[0][j - 1]);
  const ref::Mat rows = ref::rows_of(seq);
  CHECK(ref::max_diff(ref::block(block, rows, rows, allowed), out) <= 1e-9);
}

TEST_CASE("ssam over a single node")
{
  ParameterStore store(7);
  std::mt19937_64 rng(7);
  SelectiveAttention a = SelectiveAttention::create(store, "s", 4, 2);
  Tensor node = random_tensor({1, 1, 4}, rng);
  auto r = a.forward(node, node, key_padding_mask({{true}}, 1));
  for (double d : r.scores.dense.data()) CHECK(d == 1.0);
}

TEST_CASE("ssam is permutation equivariant over agents")
{
  ParameterStore store(8);
  std::mt19937_64 rng(8);
  SelectiveAttentionBlock block = SelectiveAttentionBlock::create(store, "s", 8, 2);
  randomize_biases(store, rng);
  Tensor nodes = random_tensor({5, 8}, rng);
  std::vector<bool> valid{true, true, false, true, true};
  Tensor out = ssam(block, nodes, valid);
  const std::vector<std::size_t> perm{3, 0, 4, 2, 1};
  std::vector<Tensor> rows;
  std::vector<bool> pvalid;
  for (std::size_t p : perm) {
    rows.push_back(slice(nodes, 0, p, p + 1));
    pvalid.push_back(valid[p]);
  }
  Tensor pout = ssam(block, concat(rows, 0), pvalid);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK(bitwise_equal(slice(pout, 0, i, i + 1), slice(out, 0, perm[i], perm[i] + 1)));
  }
}

TEST_CASE("duplicating an agent matches the recomputation oracle")
{
  ParameterStore store(9);
  std::mt19937_64 rng(9);
  SelectiveAttentionBlock block = SelectiveAttentionBlock::create(store, "s", 8, 2);
  randomize_biases(store, rng);
  Tensor nodes = random_tensor({3, 8}, rng);
  Tensor dup = concat({nodes, slice(nodes, 0, 1, 2)}, 0);
  Tensor out = ssam(block, dup, {true, true, true, true});
  const ref::Mat rows = ref::rows_of(dup);
  CHECK(ref::max_diff(ref::block(block, rows, rows, ref::all_allowed(4, 4)), out) <= 1e-9);
  // The duplicate and its source see identical inputs, so their outputs coincide.
  CHECK(max_abs_diff(slice(out, 0, 1, 2), slice(out, 0, 3, 4)) <= 1e-12);
}

TEST_CASE("invalid agents are ignored as keys")
{
  ParameterStore store(10);
  std::mt19937_64 rng(10);
  SelectiveAttentionBlock block = SelectiveAttentionBlock::create(store, "s", 8, 2);
  Tensor nodes = random_tensor({3, 8}, rng);
  Tensor a = ssam(block, nodes, {true, false, true});
  Tensor changed = concat({slice(nodes, 0, 0, 1), random_tensor({1, 8}, rng), slice(nodes, 0, 2, 3)}, 0);
  Tensor b = ssam(block, changed, {true, false, true});
  CHECK(bitwise_equal(slice(a, 0, 0, 1), slice(b, 0, 0, 1)));
  CHECK(bitwise_equal(slice(a, 0, 2, 3), slice(b, 0, 2, 3)));
}

TEST_CASE("heads must divide the width")
{
  ParameterStore store(0);
  CHECK_THROWS(SelectiveAttention::create(store, "bad", 6, 4));
}

TEST_CASE("tsam and ssam gradients on three agents with three patches")
{
  ParameterStore store(11);
  std::mt19937_64 rng(11);
  SelectiveAttentionBlock temporal = SelectiveAttentionBlock::create(store, "t", 4, 2);
  SelectiveAttentionBlock spatial = SelectiveAttentionBlock::create(store, "s", 4, 2);
  randomize_biases(store, rng);
  Tensor seq = random_tensor({3, 4, 4}, rng, 1.0, true);
  Tensor probe = random_tensor({3, 4}, rng);
  std::vector<Tensor> inputs{seq};
  for (auto & p : store.parameters()) inputs.push_back(p.value);
  auto loss = [&] {
    Tensor summary = reshape(slice(tsam(temporal, seq), 1, 0, 1), {3, 4});
    return sum(ssam(spatial, summary, {true, true, true}) * probe);
  };
  auto report = grad_check_report(loss, std::span<Tensor>(inputs));
  CHECK(report.max_error <= 1e-4);
  Tensor l = loss();
  l.backward();
  for (auto & p : inputs) {
    REQUIRE(p.has_grad());
    for (double g : p.grad()) CHECK(std::isfinite(g));
  }
}
