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

#include "freqtraj/grad_check.hpp"
#include "freqtraj/patching.hpp"
#include "support.hpp"

using namespace freqtraj;
using freqtraj::testing::bitwise_equal;
using freqtraj::testing::max_abs_diff;
using freqtraj::testing::random_tensor;

TEST_CASE("patch counts")
{
  CHECK(patch_count(20, 5, 5) == 4);
  CHECK(patch_count(8, 8, 1) == 1);
  CHECK(patch_count(20, 5, 2) == 8);
  CHECK_THROWS(patch_count(4, 5, 1));
  CHECK_THROWS(patch_count(4, 2, 0));
}

TEST_CASE("patch 3 of window 5 stride 2 covers steps 6..10")
{
  Shape s{1, 20, 1};
  std::vector<double> v(20);
  for (std::size_t i = 0; i < 20; ++i) v[i] = double(i);
  Tensor p = patchify(Tensor::from(s, v), 5, 2);
  REQUIRE(p.shape() == Shape{1, 8, 5});
  for (std::size_t j = 0; j < 5; ++j) CHECK(p.at({0, 3, j}) == double(6 + j));
}

TEST_CASE("a full window is the whole flattened series")
{
  std::mt19937_64 rng(0);
  Tensor x = random_tensor({2, 8, 3}, rng);
  Tensor p = patchify(x, 8, 1);
  REQUIRE(p.shape() == Shape{2, 1, 24});
  CHECK(bitwise_equal(reshape(p, {2, 8, 3}), x));
}

TEST_CASE("default granularities resolve against the history length")
{
  auto a = Granularity{2, 0}.resolve(8);
  CHECK(a.stride == 1);
  auto full = Granularity{0, 0}.resolve(8);
  CHECK(full.window == 8);
  CHECK(full.stride == 8);
  CHECK_THROWS(Granularity{9, 1}.resolve(8));
}

TEST_CASE("patches never reach past the sequence")
{
  for (std::size_t t = 1; t <= 30; ++t)
    for (std::size_t w = 1; w <= t; ++w)
      for (std::size_t s = 1; s <= t; ++s) {
        const std::size_t p = patch_count(t, w, s);
        CHECK(p >= 1);
        // P * stride + (window - stride) <= T, kept unsigned.
        CHECK(p * s + w <= t + s);
      }
}

TEST_CASE("patch validity follows step validity")
{
  std::vector<std::vector<bool>> steps{{false, false, true, false}};
  auto v = patch_validity(steps, 2, 1);
  REQUIRE(v[0].size() == 3);
  CHECK_FALSE(v[0][0]);
  CHECK(v[0][1]);
  CHECK(v[0][2]);
}

namespace
{
GranularityEncoder make_encoder(ParameterStore & store, Granularity g, std::size_t length = 8)
{
  return GranularityEncoder::create(store, "g", g, length, 3, 8, 2);
}
}  // namespace

TEST_CASE("single-patch encoding is a deterministic function of that patch")
{
  ParameterStore store(1);
  GranularityEncoder enc = make_encoder(store, {0, 0});
  std::mt19937_64 rng(1);
  Tensor x = random_tensor({1, 8, 3}, rng);
  Tensor first = enc(x);
  CHECK(first.shape() == Shape{1, 8});
  CHECK(bitwise_equal(first, enc(x)));
  // Batching with an unrelated sequence changes nothing for the first one.
  Tensor both = enc(concat({x, random_tensor({1, 8, 3}, rng)}, 0));
  CHECK(max_abs_diff(slice(both, 0, 0, 1), first) == 0.0);
}

TEST_CASE("permuting input channels with the projection rows leaves the output unchanged")
{
  ParameterStore store(2);
  GranularityEncoder enc = make_encoder(store, {2, 1});
  std::mt19937_64 rng(2);
  Tensor x = random_tensor({2, 8, 3}, rng);
  Tensor ref = enc(x);

  const std::vector<std::size_t> perm{2, 0, 1};
  Tensor xp = concat({slice(x, 2, 2, 3), slice(x, 2, 0, 1), slice(x, 2, 1, 2)}, 2);
  // Row (step, c) of the first projection weight moves to (step, position of c in perm).
  GranularityEncoder moved = enc;
  const std::size_t w = enc.granularity.window;
  const std::size_t out = enc.projection.first.out_features();
  std::vector<double> rows(enc.projection.first.weight.numel());
  for (std::size_t step = 0; step < w; ++step)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t o = 0; o < out; ++o)
        rows[(step * 3 + c) * out + o] = enc.projection.first.weight.at({step * 3 + perm[c], o});
  moved.projection.first.weight = Tensor::from(enc.projection.first.weight.shape(), rows);
  CHECK(max_abs_diff(moved(xp), ref) <= 1e-12);
}

TEST_CASE("the summary token reacts to the last patch like a direct recomputation")
{
  ParameterStore store(3);
  GranularityEncoder enc = make_encoder(store, {2, 2});
  std::mt19937_64 rng(3);
  Tensor x = random_tensor({1, 8, 3}, rng);
  Tensor patches = enc.embed(x);
  Tensor changed = patches.clone();
  for (std::size_t j = 0; j < 8; ++j) changed.mutable_data()[3 * 8 + j] += 0.5;

  auto direct = [&](const Tensor & p) {
    Tensor token = reshape(enc.summary_token, {1, 1, 8});
    Tensor seq = concat({token, p}, 1) + sinusoidal_positions(5, 8);
    return reshape(slice(tsam(enc.tsam, seq), 1, 0, 1), {1, 8});
  };
  Tensor a = enc.encode(patches);
  Tensor b = enc.encode(changed);
  CHECK(max_abs_diff(a, b) > 1e-6);
  CHECK(max_abs_diff(a, direct(patches)) <= 1e-12);
  CHECK(max_abs_diff(b, direct(changed)) <= 1e-12);
}

TEST_CASE("fusion of one summary and of tied duplicates")
{
  ParameterStore store(4);
  std::mt19937_64 rng(4);
  GranularityFusion single = GranularityFusion::create(store, "f1", 1, 4, 6);
  GranularityFusion dup = GranularityFusion::create(store, "f2", 2, 4, 6);
  // First half copies the single-branch weights, second half is zero.
  std::vector<double> w(8 * 6, 0.0);
  for (std::size_t i = 0; i < 4 * 6; ++i) w[i] = single.mlp.first.weight[i];
  dup.mlp.first.weight = Tensor::from({8, 6}, w);
  dup.mlp.first.bias = single.mlp.first.bias;
  dup.mlp.second = single.mlp.second;
  Tensor s = random_tensor({3, 4}, rng);
  CHECK(max_abs_diff(dup({s, s}), single({s})) <= 1e-12);
  CHECK(single({s}).shape() == Shape{3, 6});
  GranularityFusion three = GranularityFusion::create(store, "f3", 3, 4, 6);
  CHECK(three({s, s, s}).shape() == Shape{3, 6});
  CHECK_THROWS(single({}));
}

TEST_CASE("zero history yields an input-independent encoding")
{
  ParameterStore store(5);
  GranularityEncoder enc = make_encoder(store, {4, 2});
  Tensor a = enc(Tensor::zeros({1, 8, 3}));
  Tensor b = enc(Tensor::zeros({2, 8, 3}));
  CHECK(max_abs_diff(a, slice(b, 0, 1, 2)) == 0.0);
}

TEST_CASE("encoder gradients pass a finite-difference check")
{
  ParameterStore store(6);
  GranularityEncoder enc = make_encoder(store, {2, 1}, 6);
  std::mt19937_64 rng(6);
  Tensor x = random_tensor({2, 6, 3}, rng, 1.0, true);
  Tensor probe = random_tensor({2, 8}, rng);
  std::vector<Tensor> inputs{x};
  for (auto & p : store.parameters()) inputs.push_back(p.value);
  CHECK(grad_check([&] { return sum(enc(x) * probe); }, std::span<Tensor>(inputs)) <= 1e-4);
}
