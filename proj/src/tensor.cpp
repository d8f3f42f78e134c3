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

#include "freqtraj/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

namespace freqtraj
{

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

std::size_t numel(const Shape & shape)
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape & shape)
{
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    os << (i ? "," : "") << shape[i];
  }
  os << ']';
  return os.str();
}

namespace detail
{
std::vector<double> & Node::grad_buffer()
{
  if (grad.empty()) {
    grad.assign(value.size(), 0.0);
  }
  return grad;
}
}  // namespace detail

namespace
{

using detail::Node;
using detail::NodePtr;

std::size_t normalize_axis(int axis, std::size_t rank, const char * op)
{
  const int r = static_cast<int>(rank);
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for rank " +
                     std::to_string(rank));
  }
  return static_cast<std::size_t>(a);
}

struct AxisSplit
{
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape & shape, std::size_t axis)
{
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

bool is_suffix(const Shape & small, const Shape & big)
{
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

Shape broadcast_shape(const Shape & a, const Shape & b, const char * op)
{
  if (a == b) return a;
  if (is_suffix(b, a)) return a;
  if (is_suffix(a, b)) return b;
  throw ShapeError(std::string(op) + ": shapes " + to_string(a) + " and " + to_string(b) +
                   " do not broadcast on trailing dimensions");
}

Node & parent(Node & out, std::size_t i) { return *out.parents[i]; }

// Strided index map from output flat index to input flat index.
std::vector<std::size_t> strides_of(const Shape & shape)
{
  std::vector<std::size_t> st(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) st[i - 1] = st[i] * shape[i];
  return st;
}

template <typename Forward, typename Backward>
Tensor binary_op(const Tensor & a, const Tensor & b, const char * name, Forward f, Backward df)
{
  Shape out_shape = broadcast_shape(a.shape(), b.shape(), name);
  const std::size_t n = numel(out_shape);
  const std::size_t na = a.numel();
  const std::size_t nb = b.numel();
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i % na], bv[i % nb]);
  return Tensor::make_op(std::move(out_shape), std::move(out), {a, b}, [n, na, nb, df](Node & o) {
    Node & pa = parent(o, 0);
    Node & pb = parent(o, 1);
    const auto & g = o.grad;
    double * ga = pa.requires_grad ? pa.grad_buffer().data() : nullptr;
    double * gb = pb.requires_grad ? pb.grad_buffer().data() : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = pa.value[i % na];
      const double y = pb.value[i % nb];
      double dx = 0.0;
      double dy = 0.0;
      df(x, y, o.value[i], dx, dy);
      if (ga) ga[i % na] += g[i] * dx;
      if (gb) gb[i % nb] += g[i] * dy;
    }
  });
}

// `df(x, y)` returns d(out)/d(in) given input x and output y.
template <typename Forward, typename Derivative>
Tensor unary_op(const Tensor & a, Forward f, Derivative df)
{
  auto av = a.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  return Tensor::make_op(a.shape(), std::move(out), {a}, [df](Node & o) {
    Node & p = parent(o, 0);
    auto & gp = p.grad_buffer();
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += o.grad[i] * df(p.value[i], o.value[i]);
  });
}

Tensor gather_op(const Tensor & a, Shape out_shape, std::vector<std::size_t> index)
{
  auto av = a.data();
  std::vector<double> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) out[i] = av[index[i]];
  auto shared = std::make_shared<std::vector<std::size_t>>(std::move(index));
  return Tensor::make_op(std::move(out_shape), std::move(out), {a}, [shared](Node & o) {
    auto & gp = parent(o, 0).grad_buffer();
    const auto & idx = *shared;
    for (std::size_t i = 0; i < idx.size(); ++i) gp[idx[i]] += o.grad[i];
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor handle

namespace
{
thread_local bool g_no_grad = false;
}

NoGradGuard::NoGradGuard() : previous_(g_no_grad) { g_no_grad = true; }
NoGradGuard::~NoGradGuard() { g_no_grad = previous_; }
bool NoGradGuard::active() { return g_no_grad; }

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad)
{
  const std::size_t n = freqtraj::numel(shape);
  return from(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad)
{
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor extents must be positive, got " + to_string(shape));
  }
  if (freqtraj::numel(shape) != values.size()) {
    throw ShapeError("shape " + to_string(shape) + " holds " + std::to_string(freqtraj::numel(shape)) +
                     " values, got " + std::to_string(values.size()));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value) { return from({}, {value}); }

const Shape & Tensor::shape() const { return node_->shape; }

std::size_t Tensor::dim(int axis) const { return shape()[normalize_axis(axis, rank(), "dim")]; }

std::size_t Tensor::numel() const { return node_->value.size(); }

std::span<const double> Tensor::data() const { return node_->value; }

std::span<double> Tensor::mutable_data() { return node_->value; }

double Tensor::item() const
{
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
  return node_->value[0];
}

double Tensor::at(std::initializer_list<std::size_t> index) const
{
  if (index.size() != rank()) throw ShapeError("at(): index rank mismatch for " + to_string(shape()));
  std::size_t flat = 0;
  std::size_t i = 0;
  for (auto v : index) {
    if (v >= shape()[i]) throw ShapeError("at(): index out of range for " + to_string(shape()));
    flat = flat * shape()[i] + v;
    ++i;
  }
  return node_->value[flat];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::set_requires_grad(bool on)
{
  if (!node_->leaf) throw std::logic_error("requires_grad can only be toggled on leaves");
  node_->requires_grad = on;
}

bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }

std::span<const double> Tensor::grad() const { return node_->grad; }

void Tensor::zero_grad() { node_->grad.clear(); }

bool Tensor::is_leaf() const { return node_->leaf; }

Tensor Tensor::detach() const { return from(shape(), node_->value, false); }

Tensor Tensor::clone() const { return from(shape(), node_->value, requires_grad()); }

Tensor Tensor::make_op(
  Shape shape, std::vector<double> value, std::vector<Tensor> parents,
  std::function<void(Node &)> backward)
{
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->leaf = false;
  if (g_no_grad) return Tensor(std::move(node));
  for (const auto & p : parents) {
    if (p.requires_grad()) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->parents.reserve(parents.size());
    for (auto & p : parents) node->parents.push_back(p.node_);
    node->backward_fn = std::move(backward);
  }
  return Tensor(std::move(node));
}

void Tensor::backward() const
{
  if (numel() != 1) throw ShapeError("backward() needs a scalar loss, got shape " + to_string(shape()));
  if (!requires_grad()) throw std::logic_error("backward(): loss does not depend on any gradient leaf");
  if (!node_->leaf && !node_->backward_fn) {
    throw std::logic_error("backward(): graph already released");
  }

  // Post-order DFS, iterative.
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto & [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node * p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node * n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
  for (Node * n : order) {
    if (n->leaf) continue;
    n->backward_fn = nullptr;
    n->parents.clear();
    n->grad.clear();
    n->grad.shrink_to_fit();
  }
}

// ---------------------------------------------------------------------------
// Elementwise

Tensor add(const Tensor & a, const Tensor & b)
{
  return binary_op(
    a, b, "add", [](double x, double y) { return x + y; },
    [](double, double, double, double & dx, double & dy) {
      dx = 1.0;
      dy = 1.0;
    });
}

Tensor sub(const Tensor & a, const Tensor & b)
{
  return binary_op(
    a, b, "sub", [](double x, double y) { return x - y; },
    [](double, double, double, double & dx, double & dy) {
      dx = 1.0;
      dy = -1.0;
    });
}

Tensor mul(const Tensor & a, const Tensor & b)
{
  return binary_op(
    a, b, "mul", [](double x, double y) { return x * y; },
    [](double x, double y, double, double & dx, double & dy) {
      dx = y;
      dy = x;
    });
}

Tensor div(const Tensor & a, const Tensor & b)
{
  return binary_op(
    a, b, "div", [](double x, double y) { return x / y; },
    [](double, double y, double out, double & dx, double & dy) {
      dx = 1.0 / y;
      dy = -out / y;
    });
}

Tensor add_scalar(const Tensor & a, double s)
{
  return unary_op(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor mul_scalar(const Tensor & a, double s)
{
  return unary_op(a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor neg(const Tensor & a) { return mul_scalar(a, -1.0); }

Tensor relu(const Tensor & a)
{
  return unary_op(
    a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor square(const Tensor & a)
{
  return unary_op(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sqrt(const Tensor & a)
{
  return unary_op(a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Tensor sigmoid(const Tensor & a)
{
  return unary_op(
    a,
    [](double x) {
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      const double e = std::exp(x);
      return e / (1.0 + e);
    },
    [](double, double y) { return y * (1.0 - y); });
}

Tensor abs(const Tensor & a)
{
  return unary_op(
    a, [](double x) { return std::fabs(x); },
    [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor log(const Tensor & a)
{
  return unary_op(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor exp(const Tensor & a)
{
  return unary_op(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor smooth_l1(const Tensor & a)
{
  return unary_op(
    a,
    [](double x) {
      const double ax = std::fabs(x);
      return ax < 1.0 ? 0.5 * x * x : ax - 0.5;
    },
    [](double x, double) { return std::fabs(x) < 1.0 ? x : (x > 0.0 ? 1.0 : -1.0); });
}

// ---------------------------------------------------------------------------
// Linear algebra

Tensor matmul(const Tensor & a, const Tensor & b)
{
  const auto & sa = a.shape();
  const auto & sb = b.shape();
  auto mismatch = [&]() {
    return ShapeError("matmul: incompatible shapes " + to_string(sa) + " and " + to_string(sb));
  };
  if (sa.size() < 2 || sb.size() < 2) throw mismatch();

  const std::size_t m = sa[sa.size() - 2];
  const std::size_t k = sa.back();
  if (sb[sb.size() - 2] != k) throw mismatch();
  const std::size_t n = sb.back();

  if (sb.size() == 2) {
    const std::size_t rows = a.numel() / k;
    Shape out_shape = sa;
    out_shape.back() = n;
    std::vector<double> out(rows * n);
    MatrixMap(out.data(), rows, n).noalias() =
      ConstMatrixMap(a.data().data(), rows, k) * ConstMatrixMap(b.data().data(), k, n);
    return Tensor::make_op(std::move(out_shape), std::move(out), {a, b}, [rows, k, n](Node & o) {
      Node & pa = parent(o, 0);
      Node & pb = parent(o, 1);
      ConstMatrixMap g(o.grad.data(), rows, n);
      if (pa.requires_grad) {
        MatrixMap(pa.grad_buffer().data(), rows, k).noalias() +=
          g * ConstMatrixMap(pb.value.data(), k, n).transpose();
      }
      if (pb.requires_grad) {
        MatrixMap(pb.grad_buffer().data(), k, n).noalias() +=
          ConstMatrixMap(pa.value.data(), rows, k).transpose() * g;
      }
    });
  }

  if (sa.size() != sb.size() || !std::equal(sa.begin(), sa.end() - 2, sb.begin())) throw mismatch();
  std::size_t batch = 1;
  for (std::size_t i = 0; i + 2 < sa.size(); ++i) batch *= sa[i];
  Shape out_shape = sa;
  out_shape.back() = n;
  std::vector<double> out(batch * m * n);
  for (std::size_t i = 0; i < batch; ++i) {
    MatrixMap(out.data() + i * m * n, m, n).noalias() =
      ConstMatrixMap(a.data().data() + i * m * k, m, k) * ConstMatrixMap(b.data().data() + i * k * n, k, n);
  }
  return Tensor::make_op(std::move(out_shape), std::move(out), {a, b}, [batch, m, k, n](Node & o) {
    Node & pa = parent(o, 0);
    Node & pb = parent(o, 1);
    double * ga = pa.requires_grad ? pa.grad_buffer().data() : nullptr;
    double * gb = pb.requires_grad ? pb.grad_buffer().data() : nullptr;
    for (std::size_t i = 0; i < batch; ++i) {
      ConstMatrixMap g(o.grad.data() + i * m * n, m, n);
      if (ga) {
        MatrixMap(ga + i * m * k, m, k).noalias() += g * ConstMatrixMap(pb.value.data() + i * k * n, k, n).transpose();
      }
      if (gb) {
        MatrixMap(gb + i * k * n, k, n).noalias() += ConstMatrixMap(pa.value.data() + i * m * k, m, k).transpose() * g;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Structural

Tensor concat(const std::vector<Tensor> & parts, int axis)
{
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape & first = parts.front().shape();
  const std::size_t ax = normalize_axis(axis, first.size(), "concat");
  Shape out_shape = first;
  out_shape[ax] = 0;
  for (const auto & p : parts) {
    const Shape & s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) {
      if (i != ax && s[i] != first[i]) ok = false;
    }
    if (!ok) throw ShapeError("concat: " + to_string(s) + " does not match " + to_string(first) +
                              " off axis " + std::to_string(ax));
    out_shape[ax] += s[ax];
  }
  const AxisSplit split = split_at(out_shape, ax);
  std::vector<double> out(numel(out_shape));
  std::vector<std::size_t> widths;
  for (const auto & p : parts) widths.push_back(p.shape()[ax] * split.inner);
  const std::size_t row = split.extent * split.inner;
  std::size_t offset = 0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    auto pv = parts[pi].data();
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(pv.data() + o * widths[pi], widths[pi], out.data() + o * row + offset);
    }
    offset += widths[pi];
  }
  return Tensor::make_op(std::move(out_shape), std::move(out), parts, [widths, row, split](Node & o) {
    std::size_t off = 0;
    for (std::size_t pi = 0; pi < widths.size(); ++pi) {
      Node & p = parent(o, pi);
      if (p.requires_grad) {
        auto & gp = p.grad_buffer();
        for (std::size_t r = 0; r < split.outer; ++r) {
          for (std::size_t j = 0; j < widths[pi]; ++j) gp[r * widths[pi] + j] += o.grad[r * row + off + j];
        }
      }
      off += widths[pi];
    }
  });
}

Tensor slice(const Tensor & a, int axis, std::size_t begin, std::size_t end)
{
  const std::size_t ax = normalize_axis(axis, a.rank(), "slice");
  if (begin >= end || end > a.shape()[ax]) {
    throw ShapeError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") invalid for axis " + std::to_string(ax) + " of " + to_string(a.shape()));
  }
  const AxisSplit split = split_at(a.shape(), ax);
  Shape out_shape = a.shape();
  out_shape[ax] = end - begin;
  std::vector<std::size_t> index;
  index.reserve(numel(out_shape));
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t j = begin; j < end; ++j) {
      for (std::size_t i = 0; i < split.inner; ++i) index.push_back((o * split.extent + j) * split.inner + i);
    }
  }
  return gather_op(a, std::move(out_shape), std::move(index));
}

Tensor reshape(const Tensor & a, Shape shape)
{
  if (numel(shape) != a.numel()) {
    throw ShapeError("reshape: cannot view " + to_string(a.shape()) + " as " + to_string(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return Tensor::make_op(std::move(shape), std::move(out), {a}, [](Node & o) {
    auto & gp = parent(o, 0).grad_buffer();
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += o.grad[i];
  });
}

Tensor permute(const Tensor & a, const std::vector<std::size_t> & order)
{
  const Shape & s = a.shape();
  std::vector<bool> used(s.size(), false);
  bool ok = order.size() == s.size();
  for (std::size_t i = 0; ok && i < order.size(); ++i) {
    ok = order[i] < s.size() && !used[order[i]];
    if (ok) used[order[i]] = true;
  }
  if (!ok) throw ShapeError("permute: invalid axis order for " + to_string(s));

  Shape out_shape(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out_shape[i] = s[order[i]];
  const auto in_strides = strides_of(s);
  const std::size_t n = a.numel();
  std::vector<std::size_t> index(n);
  std::vector<std::size_t> counter(s.size(), 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t src = 0;
    for (std::size_t d = 0; d < s.size(); ++d) src += counter[d] * in_strides[order[d]];
    index[flat] = src;
    for (std::size_t d = s.size(); d-- > 0;) {
      if (++counter[d] < out_shape[d]) break;
      counter[d] = 0;
    }
  }
  return gather_op(a, std::move(out_shape), std::move(index));
}

Tensor transpose(const Tensor & a, int axis0, int axis1)
{
  const std::size_t x = normalize_axis(axis0, a.rank(), "transpose");
  const std::size_t y = normalize_axis(axis1, a.rank(), "transpose");
  std::vector<std::size_t> order(a.rank());
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[x], order[y]);
  return permute(a, order);
}

Tensor expand(const Tensor & a, Shape shape)
{
  const Shape & s = a.shape();
  bool ok = s.size() == shape.size();
  for (std::size_t i = 0; ok && i < s.size(); ++i) ok = s[i] == shape[i] || s[i] == 1;
  if (!ok) throw ShapeError("expand: cannot expand " + to_string(s) + " to " + to_string(shape));

  const auto in_strides = strides_of(s);
  const std::size_t n = numel(shape);
  std::vector<std::size_t> index(n);
  std::vector<std::size_t> counter(s.size(), 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t src = 0;
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (s[d] != 1) src += counter[d] * in_strides[d];
    }
    index[flat] = src;
    for (std::size_t d = s.size(); d-- > 0;) {
      if (++counter[d] < shape[d]) break;
      counter[d] = 0;
    }
  }
  return gather_op(a, std::move(shape), std::move(index));
}

// ---------------------------------------------------------------------------
// Reductions and normalizations

double exact_sum(std::span<const double> values)
{
  // Shewchuk's non-overlapping partials with a final half-even correction.
  std::vector<double> partials;
  for (double x : values) {
    std::size_t used = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

Tensor matmul_exact(const Tensor & a, const Tensor & b)
{
  if (a.rank() < 2 || b.rank() != a.rank() ||
      !std::equal(a.shape().begin(), a.shape().end() - 2, b.shape().begin()) || a.dim(-1) != b.dim(-2)) {
    throw ShapeError("matmul_exact: incompatible shapes " + to_string(a.shape()) + " and " + to_string(b.shape()));
  }
  const std::size_t m = a.dim(-2);
  const std::size_t k = a.dim(-1);
  const std::size_t n = b.dim(-1);
  const std::size_t batches = a.numel() / (m * k);
  Shape shape = a.shape();
  shape.back() = n;
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(batches * m * n);
  std::vector<double> terms(k);
  for (std::size_t p = 0; p < batches; ++p) {
    const double * x = av.data() + p * m * k;
    const double * y = bv.data() + p * k * n;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t r = 0; r < k; ++r) terms[r] = x[i * k + r] * y[r * n + j];
        out[(p * m + i) * n + j] = exact_sum(terms);
      }
  }
  return Tensor::make_op(std::move(shape), std::move(out), {a, b}, [batches, m, k, n](Node & o) {
    Node & pa = parent(o, 0);
    Node & pb = parent(o, 1);
    const double * g = o.grad.data();
    if (pa.requires_grad) {
      auto & ga = pa.grad_buffer();
      for (std::size_t p = 0; p < batches; ++p)
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t r = 0; r < k; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += g[(p * m + i) * n + j] * pb.value[(p * k + r) * n + j];
            ga[(p * m + i) * k + r] += s;
          }
    }
    if (pb.requires_grad) {
      auto & gb = pb.grad_buffer();
      for (std::size_t p = 0; p < batches; ++p)
        for (std::size_t r = 0; r < k; ++r)
          for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += pa.value[(p * m + i) * k + r] * g[(p * m + i) * n + j];
            gb[(p * k + r) * n + j] += s;
          }
    }
  });
}

Tensor softmax(const Tensor & a)
{
  if (a.rank() == 0) throw ShapeError("softmax: scalar input");
  const std::size_t n = a.shape().back();
  const std::size_t rows = a.numel() / n;
  auto av = a.data();
  std::vector<double> out(av.size(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double * x = av.data() + r * n;
    double * y = out.data() + r * n;
    const double peak = *std::max_element(x, x + n);
    if (peak == -std::numeric_limits<double>::infinity()) continue;
    for (std::size_t j = 0; j < n; ++j) y[j] = std::exp(x[j] - peak);
    const double total = exact_sum(std::span<const double>(y, n));
    for (std::size_t j = 0; j < n; ++j) y[j] /= total;
  }
  return Tensor::make_op(a.shape(), std::move(out), {a}, [rows, n](Node & o) {
    auto & gp = parent(o, 0).grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      const double * y = o.value.data() + r * n;
      const double * g = o.grad.data() + r * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += g[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) gp[r * n + j] += y[j] * (g[j] - dot);
    }
  });
}

Tensor log_softmax(const Tensor & a)
{
  if (a.rank() == 0) throw ShapeError("log_softmax: scalar input");
  const std::size_t n = a.shape().back();
  const std::size_t rows = a.numel() / n;
  auto av = a.data();
  std::vector<double> out(av.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double * x = av.data() + r * n;
    const double peak = *std::max_element(x, x + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += std::exp(x[j] - peak);
    const double lse = peak + std::log(total);
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = x[j] - lse;
  }
  return Tensor::make_op(a.shape(), std::move(out), {a}, [rows, n](Node & o) {
    auto & gp = parent(o, 0).grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      double gsum = 0.0;
      for (std::size_t j = 0; j < n; ++j) gsum += o.grad[r * n + j];
      for (std::size_t j = 0; j < n; ++j) {
        gp[r * n + j] += o.grad[r * n + j] - std::exp(o.value[r * n + j]) * gsum;
      }
    }
  });
}

Tensor sum(const Tensor & a)
{
  auto av = a.data();
  double total = 0.0;
  for (double v : av) total += v;
  return Tensor::make_op({}, {total}, {a}, [](Node & o) {
    auto & gp = parent(o, 0).grad_buffer();
    for (double & g : gp) g += o.grad[0];
  });
}

Tensor mean(const Tensor & a) { return mul_scalar(sum(a), 1.0 / static_cast<double>(a.numel())); }

Tensor sum(const Tensor & a, int axis, bool keepdim)
{
  const std::size_t ax = normalize_axis(axis, a.rank(), "sum");
  const AxisSplit split = split_at(a.shape(), ax);
  Shape out_shape = a.shape();
  if (keepdim) {
    out_shape[ax] = 1;
  } else {
    out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(ax));
  }
  auto av = a.data();
  std::vector<double> out(split.outer * split.inner, 0.0);
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t j = 0; j < split.extent; ++j) {
      for (std::size_t i = 0; i < split.inner; ++i) {
        out[o * split.inner + i] += av[(o * split.extent + j) * split.inner + i];
      }
    }
  }
  return Tensor::make_op(std::move(out_shape), std::move(out), {a}, [split](Node & o) {
    auto & gp = parent(o, 0).grad_buffer();
    for (std::size_t r = 0; r < split.outer; ++r) {
      for (std::size_t j = 0; j < split.extent; ++j) {
        for (std::size_t i = 0; i < split.inner; ++i) {
          gp[(r * split.extent + j) * split.inner + i] += o.grad[r * split.inner + i];
        }
      }
    }
  });
}

Tensor mean(const Tensor & a, int axis, bool keepdim)
{
  const std::size_t ax = normalize_axis(axis, a.rank(), "mean");
  return mul_scalar(sum(a, axis, keepdim), 1.0 / static_cast<double>(a.shape()[ax]));
}

Tensor cumsum(const Tensor & a, int axis)
{
  const std::size_t ax = normalize_axis(axis, a.rank(), "cumsum");
  const AxisSplit split = split_at(a.shape(), ax);
  auto av = a.data();
  std::vector<double> out(av.begin(), av.end());
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t j = 1; j < split.extent; ++j) {
      for (std::size_t i = 0; i < split.inner; ++i) {
        out[(o * split.extent + j) * split.inner + i] += out[(o * split.extent + j - 1) * split.inner + i];
      }
    }
  }
  return Tensor::make_op(a.shape(), std::move(out), {a}, [split](Node & o) {
    auto & gp = parent(o, 0).grad_buffer();
    for (std::size_t r = 0; r < split.outer; ++r) {
      for (std::size_t i = 0; i < split.inner; ++i) {
        double running = 0.0;
        for (std::size_t j = split.extent; j-- > 0;) {
          const std::size_t at = (r * split.extent + j) * split.inner + i;
          running += o.grad[at];
          gp[at] += running;
        }
      }
    }
  });
}

Tensor layer_norm(const Tensor & x, const Tensor & gain, const Tensor & bias, double eps)
{
  if (x.rank() == 0) throw ShapeError("layer_norm: scalar input");
  const std::size_t d = x.shape().back();
  if (gain.shape() != Shape{d} || bias.shape() != Shape{d}) {
    throw ShapeError("layer_norm: input " + to_string(x.shape()) + " with gain " + to_string(gain.shape()) +
                     " and bias " + to_string(bias.shape()));
  }
  const std::size_t rows = x.numel() / d;
  auto xv = x.data();
  auto gv = gain.data();
  auto bv = bias.data();
  auto normalized = std::make_shared<std::vector<double>>(xv.size());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  std::vector<double> out(xv.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double * row = xv.data() + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double rstd = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = rstd;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (row[j] - mu) * rstd;
      (*normalized)[r * d + j] = h;
      out[r * d + j] = h * gv[j] + bv[j];
    }
  }
  return Tensor::make_op(x.shape(), std::move(out), {x, gain, bias}, [rows, d, normalized, inv_std](Node & o) {
    Node & px = parent(o, 0);
    Node & pg = parent(o, 1);
    Node & pb = parent(o, 2);
    const auto & xhat = *normalized;
    for (std::size_t r = 0; r < rows; ++r) {
      const double * g = o.grad.data() + r * d;
      if (pg.requires_grad) {
        auto & gg = pg.grad_buffer();
        for (std::size_t j = 0; j < d; ++j) gg[j] += g[j] * xhat[r * d + j];
      }
      if (pb.requires_grad) {
        auto & gb = pb.grad_buffer();
        for (std::size_t j = 0; j < d; ++j) gb[j] += g[j];
      }
      if (px.requires_grad) {
        auto & gx = px.grad_buffer();
        double mean_g = 0.0;
        double mean_gx = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double gh = g[j] * pg.value[j];
          mean_g += gh;
          mean_gx += gh * xhat[r * d + j];
        }
        mean_g /= static_cast<double>(d);
        mean_gx /= static_cast<double>(d);
        for (std::size_t j = 0; j < d; ++j) {
          const double gh = g[j] * pg.value[j];
          gx[r * d + j] += (*inv_std)[r] * (gh - mean_g - xhat[r * d + j] * mean_gx);
        }
      }
    }
  });
}

}  // namespace freqtraj
