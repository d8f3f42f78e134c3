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

#include "freqtraj/attention.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace freqtraj
{

namespace
{
constexpr double kBlocked = -std::numeric_limits<double>::infinity();

Tensor split_heads(const Tensor & x, std::size_t heads)
{
  const std::size_t b = x.dim(0);
  const std::size_t l = x.dim(1);
  const std::size_t d = x.dim(2);
  return permute(reshape(x, {b, l, heads, d / heads}), {0, 2, 1, 3});
}

Tensor merge_heads(const Tensor & x)
{
  const std::size_t b = x.dim(0);
  const std::size_t h = x.dim(1);
  const std::size_t l = x.dim(2);
  const std::size_t dk = x.dim(3);
  return reshape(permute(x, {0, 2, 1, 3}), {b, l, h * dk});
}
}  // namespace

CausalMask CausalMask::with_summary_token(std::size_t length)
{
  std::vector<double> values(length * length, 0.0);
  for (std::size_t i = 1; i < length; ++i) {
    for (std::size_t j = i + 1; j < length; ++j) values[i * length + j] = kBlocked;
  }
  return {Tensor::from({length, length}, std::move(values))};
}

Tensor key_padding_mask(
  const std::vector<std::vector<bool>> & key_valid, std::size_t queries, const CausalMask * base)
{
  if (key_valid.empty()) throw ShapeError("key_padding_mask: empty batch");
  const std::size_t keys = key_valid.front().size();
  if (base && base->m.shape() != Shape{queries, keys}) {
    throw ShapeError("key_padding_mask: base mask " + to_string(base->m.shape()) + " vs [" +
                     std::to_string(queries) + "," + std::to_string(keys) + "]");
  }
  std::vector<double> values(key_valid.size() * queries * keys, 0.0);
  for (std::size_t b = 0; b < key_valid.size(); ++b) {
    if (key_valid[b].size() != keys) throw ShapeError("key_padding_mask: ragged key validity");
    for (std::size_t i = 0; i < queries; ++i) {
      for (std::size_t j = 0; j < keys; ++j) {
        const bool blocked = !key_valid[b][j] || (base && !base->allows(i, j));
        values[(b * queries + i) * keys + j] = blocked ? kBlocked : 0.0;
      }
    }
  }
  return Tensor::from({key_valid.size(), queries, keys}, std::move(values));
}

SelectiveAttention SelectiveAttention::create(
  ParameterStore & store, const std::string & name, std::size_t width, std::size_t heads)
{
  if (heads == 0 || width % heads != 0) {
    throw std::invalid_argument(
      "SelectiveAttention: width " + std::to_string(width) + " not divisible by " + std::to_string(heads) + " heads");
  }
  SelectiveAttention a;
  a.width = width;
  a.heads = heads;
  a.query = Linear::kaiming(store, name + ".query", width, width);
  a.key = Linear::kaiming(store, name + ".key", width, width);
  a.value = Linear::kaiming(store, name + ".value", width, width);
  a.output = Linear::kaiming(store, name + ".output", width, width);
  a.gate_hidden = Linear::kaiming(store, name + ".gate.0", 2 * width, width);
  a.gate_out = Linear::kaiming(store, name + ".gate.1", width, 1);
  a.norm = LayerNorm::create(store, name + ".norm", width);
  return a;
}

SelectiveAttention::Result SelectiveAttention::forward(
  const Tensor & queries, const Tensor & context, const AttentionMask & mask) const
{
  if (queries.rank() != 3 || context.rank() != 3 || queries.dim(2) != width || context.dim(2) != width ||
      queries.dim(0) != context.dim(0)) {
    throw ShapeError("SelectiveAttention: queries " + to_string(queries.shape()) + " and context " +
                     to_string(context.shape()) + " incompatible with width " + std::to_string(width));
  }
  const std::size_t b = queries.dim(0);
  const std::size_t lq = queries.dim(1);
  const std::size_t lk = context.dim(1);
  const Shape score_shape{b, heads, lq, lk};
  if (mask && mask->shape() != Shape{b, lq, lk}) {
    throw ShapeError("SelectiveAttention: mask " + to_string(mask->shape()) + " for scores " + to_string(score_shape));
  }

  Tensor q = query(queries);
  Tensor k = key(context);
  Tensor v = value(context);

  const double scale = 1.0 / std::sqrt(static_cast<double>(width / heads));
  Tensor scores = matmul(split_heads(q, heads), transpose(split_heads(k, heads), -1, -2)) * scale;
  if (mask) scores = scores + expand(reshape(*mask, {b, 1, lq, lk}), score_shape);

  AttentionScores s;
  s.dense = softmax(scores);
  s.sparse = square(relu(scores));

  // First gate layer on [q_i, k_j], split into its query and key halves.
  Tensor hq = matmul(q, slice(gate_hidden.weight, 0, 0, width));
  Tensor hk = matmul(k, slice(gate_hidden.weight, 0, width, 2 * width));
  const Shape pair_shape{b, lq, lk, width};
  Tensor hidden = relu(
    expand(reshape(hq, {b, lq, 1, width}), pair_shape) + expand(reshape(hk, {b, 1, lk, width}), pair_shape) +
    gate_hidden.bias);
  s.gate = sigmoid(reshape(gate_out(hidden), {b, lq, lk}));

  Tensor g = expand(reshape(s.gate, {b, 1, lq, lk}), score_shape);
  s.blended = g * s.dense + (1.0 - g) * s.sparse;

  Result r;
  r.attended = merge_heads(matmul_exact(s.blended, split_heads(v, heads)));
  r.out = norm(queries + output(r.attended));
  r.scores = std::move(s);
  return r;
}

SelectiveAttentionBlock SelectiveAttentionBlock::create(
  ParameterStore & store, const std::string & name, std::size_t width, std::size_t heads)
{
  SelectiveAttentionBlock block;
  block.attention = SelectiveAttention::create(store, name + ".attn", width, heads);
  block.feed_forward = Mlp::create(store, name + ".ffn", width, 2 * width, width);
  block.feed_forward_norm = LayerNorm::create(store, name + ".ffn_norm", width);
  return block;
}

Tensor SelectiveAttentionBlock::operator()(
  const Tensor & queries, const Tensor & context, const AttentionMask & mask) const
{
  Tensor x = attention(queries, context, mask);
  return feed_forward_norm(x + feed_forward(x));
}

Tensor tsam(
  const SelectiveAttentionBlock & block, const Tensor & sequence, const std::vector<std::vector<bool>> & patch_valid)
{
  if (sequence.rank() != 3 || sequence.dim(1) < 2) {
    throw ShapeError("tsam: expected [B, P+1, D] with P >= 1, got " + to_string(sequence.shape()));
  }
  const std::size_t b = sequence.dim(0);
  const std::size_t length = sequence.dim(1);
  std::vector<std::vector<bool>> keys(b, std::vector<bool>(length, true));
  if (!patch_valid.empty()) {
    if (patch_valid.size() != b) throw ShapeError("tsam: patch validity batch mismatch");
    for (std::size_t i = 0; i < b; ++i) {
      if (patch_valid[i].size() != length - 1) throw ShapeError("tsam: patch validity length mismatch");
      for (std::size_t j = 0; j + 1 < length; ++j) keys[i][j + 1] = patch_valid[i][j];
    }
  }
  const CausalMask causal = CausalMask::with_summary_token(length);
  return block(sequence, sequence, key_padding_mask(keys, length, &causal));
}

Tensor ssam(const SelectiveAttentionBlock & block, const Tensor & nodes, const std::vector<bool> & agent_valid)
{
  if (nodes.rank() != 2 || nodes.dim(0) != agent_valid.size()) {
    throw ShapeError("ssam: nodes " + to_string(nodes.shape()) + " with " + std::to_string(agent_valid.size()) +
                     " validity flags");
  }
  const std::size_t n = nodes.dim(0);
  const std::size_t c = nodes.dim(1);
  Tensor batched = reshape(nodes, {1, n, c});
  Tensor out = block(batched, batched, key_padding_mask({agent_valid}, n));
  return reshape(out, {n, c});
}

Tensor sinusoidal_positions(std::size_t length, std::size_t width)
{
  std::vector<double> values(length * width);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t i = 0; i < width; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(width));
      const double angle = static_cast<double>(pos) * rate;
      values[pos * width + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return Tensor::from({length, width}, std::move(values));
}

}  // namespace freqtraj
