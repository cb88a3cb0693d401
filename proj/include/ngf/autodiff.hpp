#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ngf/tensor.hpp"

namespace ngf {

enum class ReduceKind { kMin, kMax, kMean, kSum };

std::string_view to_string(ReduceKind kind);

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape* tape() const noexcept { return tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

using RowGroups = std::vector<std::vector<std::size_t>>;
using RowIndex = std::vector<std::size_t>;

/// Records operations in creation order, which is already a topological order
/// of the (acyclic) compute graph. `backward` walks the nodes reachable from
/// the root once each, last to first.
class Tape {
 public:
  using Backprop = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Owned leaf with requires_grad set; its gradient lives on the tape.
  Var variable(Tensor value);
  /// Leaf aliasing an external tensor. When `param.requires_grad()` is set,
  /// gradients accumulate into `param.grad()`, which the caller owns and
  /// resets.
  Var parameter(Tensor& param);
  /// Read-only alias of an external tensor; never receives gradients.
  /// Lets concurrent inference share one parameter set.
  Var parameter(const Tensor& param);

  /// Accumulates d(root)/d(leaf) into every requires_grad leaf reachable from
  /// `root`. Intermediate gradients are recomputed on every call; leaf
  /// gradients are not reset, so repeated calls accumulate.
  void backward(Var root);

  /// Gradient currently held for `v` (owned leaves and intermediates). Empty
  /// if no gradient has been propagated to it.
  std::span<const double> grad(Var v) const;
  /// Zeroes owned leaf gradients. External parameters are reset by their owner.
  void zero_grad();

  std::size_t size() const noexcept { return nodes_.size(); }

  // Op authoring interface.
  Var record(std::string_view op, std::vector<Var> inputs, Tensor value, Backprop backprop);
  const Tensor& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t input(std::size_t id, std::size_t k) const { return nodes_[id].inputs[k]; }
  /// Mutable gradient buffer of node `id`, allocated (zeroed) on first use.
  std::span<double> grad_buffer(std::size_t id);
  std::span<const double> out_grad(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    std::string op;
    std::vector<std::size_t> inputs;
    Tensor value;
    const Tensor* external = nullptr;
    Tensor* grad_target = nullptr;
    bool leaf = false;
    bool requires_grad = false;
    std::vector<double> grad;
    Backprop backprop;
  };

  std::deque<Node> nodes_;
};

// Operations. All inputs must live on the same tape.

/// y = x W + b for x [n x d_in], W [d_in x d_out], b [d_out].
Var affine(Var x, Var weight, Var bias);
Var relu(Var x);
Var sigmoid(Var x);
/// Row-wise softmax of a rank-2 tensor.
Var softmax_rows(Var x);
Var sqrt_eps(Var x, double eps);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var x, double factor);
Var add_scalar(Var x, double c);
/// Elementwise min/max; on ties the gradient goes to `a`.
Var minimum(Var a, Var b);
Var maximum(Var a, Var b);

Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(Var x, std::size_t begin, std::size_t end);
Var gather_rows(Var x, std::shared_ptr<const RowIndex> rows);
Var gather_rows(Var x, RowIndex rows);

/// Reduces `axis` away. Min/max subgradients route to the first attaining
/// index along the axis.
Var reduce(Var x, std::size_t axis, ReduceKind kind);
/// Rank-2 reduction over row subsets: output row g reduces the rows listed
/// in groups[g]. Min/max ties route to the earliest row in the group list.
Var segment_reduce(Var x, std::shared_ptr<const RowGroups> groups, ReduceKind kind);
Var segment_reduce(Var x, RowGroups groups, ReduceKind kind);

Var sum(Var x);
Var mean(Var x);

/// Sum over i of w_i * -[y_i log s_i + (1 - y_i) log(1 - s_i)], with s
/// clamped into [1e-12, 1 - 1e-12].
Var binary_cross_entropy(Var probs, std::vector<double> labels, std::vector<double> weights);
/// Sum over rows i with targets[i] >= 0 of w_i * -(1 - p)^gamma log p where p
/// is the target-class probability clamped below at 1e-12.
Var focal_loss(Var probs, std::vector<int> targets, double gamma, std::vector<double> weights);

inline constexpr double kProbClamp = 1e-12;

}  // namespace ngf
