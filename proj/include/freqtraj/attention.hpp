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

#ifndef FREQTRAJ__ATTENTION_HPP_
#define FREQTRAJ__ATTENTION_HPP_

#include "freqtraj/nn.hpp"
#include "freqtraj/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace freqtraj
{

/// Additive attention mask [B, Lq, Lk]: 0 where a query may read a key, -inf elsewhere.
using AttentionMask = std::optional<Tensor>;

/// Lower-triangular allowance over a sequence whose position 0 is a summary token.
/// Row 0 (the token) reads every position; row i > 0 reads positions 0..i.
struct CausalMask
{
  Tensor m;  // [L, L]

  static CausalMask with_summary_token(std::size_t length);
  bool allows(std::size_t query, std::size_t key) const { return m.at({query, key}) == 0.0; }
};

/// Combines a per-key validity flag with an optional [L, L] base pattern into [B, Lq, Lk].
Tensor key_padding_mask(
  const std::vector<std::vector<bool>> & key_valid, std::size_t queries, const CausalMask * base = nullptr);

/// Intermediate score tensors of one selective attention call.
struct AttentionScores
{
  Tensor dense;    // [B, H, Lq, Lk] softmax scores
  Tensor sparse;   // [B, H, Lq, Lk] relu(.)^2 scores
  Tensor gate;     // [B, Lq, Lk], shared across heads
  Tensor blended;  // gate * dense + (1 - gate) * sparse
};

/// Gated blend of dense softmax attention and sparse ReLU^2 attention.
///
/// The gate is a two-layer MLP on the pairwise concatenation [q_i, k_j] of projected
/// queries and keys, followed by a sigmoid. The blended scores weight the values;
/// the result goes through an output projection, a residual connection to the
/// queries, and layer normalization.
struct SelectiveAttention
{
  std::size_t width = 0;
  std::size_t heads = 1;
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  Linear gate_hidden;  // 2 * width -> width
  Linear gate_out;     // width -> 1
  LayerNorm norm;

  static SelectiveAttention create(
    ParameterStore & store, const std::string & name, std::size_t width, std::size_t heads);

  struct Result
  {
    Tensor out;       // [B, Lq, D]
    Tensor attended;  // blended scores applied to values, heads merged, [B, Lq, D]
    AttentionScores scores;
  };

  /// queries [B, Lq, D], context [B, Lk, D].
  Result forward(const Tensor & queries, const Tensor & context, const AttentionMask & mask) const;
  Tensor operator()(const Tensor & queries, const Tensor & context, const AttentionMask & mask) const
  {
    return forward(queries, context, mask).out;
  }
};

/// Selective attention followed by a position-wise feed-forward sublayer
/// (residual + layer norm around both).
struct SelectiveAttentionBlock
{
  SelectiveAttention attention;
  Mlp feed_forward;
  LayerNorm feed_forward_norm;

  static SelectiveAttentionBlock create(
    ParameterStore & store, const std::string & name, std::size_t width, std::size_t heads);

  Tensor operator()(const Tensor & queries, const Tensor & context, const AttentionMask & mask) const;
};

/// Temporal selective attention over sequences [B, P+1, D] whose position 0 is the
/// summary token. `patch_valid[b][j]` marks usable patches (index 0 refers to the
/// first patch, i.e. position 1); defaults to all valid.
Tensor tsam(
  const SelectiveAttentionBlock & block, const Tensor & sequence,
  const std::vector<std::vector<bool>> & patch_valid = {});

/// Spatial selective attention across the agents of one scenario, nodes [N, C].
/// Invalid agents are removed from the keys.
Tensor ssam(const SelectiveAttentionBlock & block, const Tensor & nodes, const std::vector<bool> & agent_valid);

/// Standard sinusoidal encodings [length, width].
Tensor sinusoidal_positions(std::size_t length, std::size_t width);

}  // namespace freqtraj

#endif  // FREQTRAJ__ATTENTION_HPP_
