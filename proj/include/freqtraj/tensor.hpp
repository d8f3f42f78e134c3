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

#ifndef FREQTRAJ__TENSOR_HPP_
#define FREQTRAJ__TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqtraj
{

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape & shape);
std::string to_string(const Shape & shape);

/// Raised for any shape contract violation; the message names the shapes involved.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail
{
struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node
{
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until something flows into it
  bool requires_grad = false;
  bool leaf = true;
  std::vector<NodePtr> parents;
  // Reads this->grad and accumulates into parents' grads.
  std::function<void(Node &)> backward_fn;

  std::vector<double> & grad_buffer();
};
}  // namespace detail

/// Dense row-major float64 array with optional participation in the gradient tape.
///
/// A Tensor is a cheap handle: copies share storage. Operations on tensors that
/// require gradients record a node holding a backward closure; `backward()` walks
/// that DAG once and releases it, leaving gradients only on leaves.
class Tensor
{
public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape & shape() const;
  std::size_t rank() const { return shape().size(); }
  /// Extent of axis `axis`; negative values count from the back.
  std::size_t dim(int axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  /// Writable storage. Only meaningful for leaves (parameters, inputs).
  std::span<double> mutable_data();
  double item() const;
  double operator[](std::size_t flat_index) const { return data()[flat_index]; }
  double at(std::initializer_list<std::size_t> index) const;

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();

  /// Reverse pass from a scalar. Gradients add into existing leaf buffers.
  void backward() const;

  /// Same values, detached from the tape.
  Tensor detach() const;
  Tensor clone() const;

  bool is_leaf() const;
  const detail::NodePtr & node() const { return node_; }

  /// Builds a taped node. `backward` receives the output node and must accumulate
  /// into the gradient buffers of the parents that require gradients.
  static Tensor make_op(
    Shape shape, std::vector<double> value, std::vector<Tensor> parents,
    std::function<void(detail::Node &)> backward);

private:
  explicit Tensor(detail::NodePtr node) : node_(std::move(node)) {}
  detail::NodePtr node_;
};

/// Disables tape recording on this thread while alive (inference, finite differences).
class NoGradGuard
{
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard & operator=(const NoGradGuard &) = delete;

  static bool active();

private:
  bool previous_;
};

// Elementwise binary ops. The shorter operand's shape must be a suffix of the
// longer one's (trailing-dimension broadcast); anything else needs `expand`.
Tensor add(const Tensor & a, const Tensor & b);
Tensor sub(const Tensor & a, const Tensor & b);
Tensor mul(const Tensor & a, const Tensor & b);
Tensor div(const Tensor & a, const Tensor & b);

Tensor add_scalar(const Tensor & a, double s);
Tensor mul_scalar(const Tensor & a, double s);
Tensor neg(const Tensor & a);

inline Tensor operator+(const Tensor & a, const Tensor & b) { return add(a, b); }
inline Tensor operator-(const Tensor & a, const Tensor & b) { return sub(a, b); }
inline Tensor operator*(const Tensor & a, const Tensor & b) { return mul(a, b); }
inline Tensor operator/(const Tensor & a, const Tensor & b) { return div(a, b); }
inline Tensor operator+(const Tensor & a, double s) { return add_scalar(a, s); }
inline Tensor operator-(const Tensor & a, double s) { return add_scalar(a, -s); }
inline Tensor operator*(const Tensor & a, double s) { return mul_scalar(a, s); }
inline Tensor operator*(double s, const Tensor & a) { return mul_scalar(a, s); }
inline Tensor operator-(double s, const Tensor & a) { return add_scalar(neg(a), s); }
inline Tensor operator-(const Tensor & a) { return neg(a); }

/// [..., M, K] x [K, N] -> [..., M, N], or batched [B..., M, K] x [B..., K, N] with equal
/// leading extents.
Tensor matmul(const Tensor & a, const Tensor & b);
/// Batched [B..., M, K] x [B..., K, N] with equal leading extents, reducing over K with
/// `exact_sum`. The result does not depend on the order of the K axis.
Tensor matmul_exact(const Tensor & a, const Tensor & b);

/// Correctly rounded sum of `values`; the result does not depend on their order.
double exact_sum(std::span<const double> values);

Tensor concat(const std::vector<Tensor> & parts, int axis);
Tensor slice(const Tensor & a, int axis, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor & a, Shape shape);
Tensor permute(const Tensor & a, const std::vector<std::size_t> & order);
Tensor transpose(const Tensor & a, int axis0, int axis1);
/// Repeats size-1 axes up to `shape`; ranks must match.
Tensor expand(const Tensor & a, Shape shape);

Tensor relu(const Tensor & a);
Tensor square(const Tensor & a);
Tensor sqrt(const Tensor & a);
Tensor sigmoid(const Tensor & a);
Tensor abs(const Tensor & a);
Tensor log(const Tensor & a);
Tensor exp(const Tensor & a);
/// Huber with unit threshold: 0.5 x^2 if |x| < 1, |x| - 0.5 otherwise.
Tensor smooth_l1(const Tensor & a);

/// Softmax over the last axis, max-subtracted, with a correctly rounded denominator
/// (permuting a row permutes its output exactly). Entries equal to -inf become 0.
Tensor softmax(const Tensor & a);
Tensor log_softmax(const Tensor & a);

Tensor sum(const Tensor & a);
Tensor mean(const Tensor & a);
Tensor sum(const Tensor & a, int axis, bool keepdim = false);
Tensor mean(const Tensor & a, int axis, bool keepdim = false);
Tensor cumsum(const Tensor & a, int axis);

/// Normalizes over the last axis, then applies per-feature gain and bias.
Tensor layer_norm(const Tensor & x, const Tensor & gain, const Tensor & bias, double eps = 1e-5);

}  // namespace freqtraj

#endif  // FREQTRAJ__TENSOR_HPP_
