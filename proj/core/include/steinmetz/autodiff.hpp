#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "steinmetz/tensor.hpp"

namespace steinmetz {

using NodeId = std::size_t;

enum class Op : std::uint8_t {
  Leaf,
  MatMul,
  Linear,
  Add,
  Sub,
  Scale,
  Relu,
  Concat,
  SliceCols,
  MeanCenterRows,
  Sum,
  Mean,
  HilbertRows,
  Mse,
  CrossEntropy,
  ComplexMagnitude,
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  NodeId id() const noexcept { return id_; }
  const Tensor& value() const;
  const Tensor& grad() const;

 private:
  Tape* tape_ = nullptr;
  NodeId id_ = 0;
};

/// Reverse-mode record of a computation over dense tensors.
///
/// Nodes are appended in evaluation order, so every input id is smaller than
/// the node that consumes it. A tape is built fresh for each batch and is not
/// thread-safe; the values it holds are immutable.
class Tape {
 public:
  struct Node {
    Op op = Op::Leaf;
    std::vector<NodeId> inputs;
    Tensor value;
    bool requires_grad = false;
    double scalar = 0.0;    // Scale factor, magnitude epsilon
    std::size_t index = 0;  // concat axis or slice offset
    std::vector<std::uint32_t> labels;
    std::vector<double> saved;  // softmax probabilities for cross-entropy
  };

  /// Leaf that receives a gradient (a parameter).
  Var variable(Tensor value);
  /// Leaf excluded from differentiation (data, targets).
  Var constant(Tensor value);

  Var record(Node node);

  const Tensor& value(NodeId id) const { return nodes_.at(id).value; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Accumulates d(loss)/d(node) for every node recorded up to `loss`.
  /// Nodes that do not depend on a variable get zero gradients. Throws
  /// ContractError for a non-scalar loss.
  void backward(Var loss);

  bool has_gradients() const noexcept { return !grads_.empty(); }
  const Tensor& grad(NodeId id) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
};

/// a[m x k] * b[k x n].
Var matmul(Var a, Var b);
/// Fully connected layer x[b x in] * W[out x in]^T + bias[out].
Var linear(Var x, Var weight, Var bias);
/// Bias-free variant, x * W^T.
Var linear(Var x, Var weight);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double factor);
/// max(x, 0); the subgradient at exactly 0 is 0.
Var relu(Var x);
/// Concatenation of two rank-2 tensors along axis 0 (rows) or 1 (columns).
Var concat(Var a, Var b, std::size_t axis = 1);
/// Columns [offset, offset + width) of a rank-2 tensor.
Var slice_cols(Var x, std::size_t offset, std::size_t width);
/// Splits a rank-2 tensor into columns [0, at) and [at, cols).
std::pair<Var, Var> split_cols(Var x, std::size_t at);
/// Subtracts each row's mean from that row.
Var mean_center_rows(Var x);
Var sum(Var x);
Var mean(Var x);
/// Frequency-domain Hilbert transform applied independently to every row.
Var hilbert_rows(Var x);
/// Mean over all entries of (pred - target)^2.
Var mse(Var pred, Var target);
/// Batch mean of -log softmax(logits)[label], max-subtracted.
Var cross_entropy(Var logits, std::span<const std::uint32_t> labels);
/// Elementwise sqrt(re^2 + im^2 + eps).
Var complex_magnitude(Var re, Var im, double eps);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(double s, Var a) { return scale(a, s); }

}  // namespace steinmetz
