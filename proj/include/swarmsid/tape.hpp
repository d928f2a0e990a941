#pragma once

#include <cstdint>
#include <vector>

#include "swarmsid/array.hpp"

namespace swarmsid {

/// Reverse-mode autodiff over dense arrays. Operations are recorded on the
/// tape in evaluation order; backward() replays them in reverse from a scalar
/// loss node. A tape is single-threaded; distinct tapes are independent.
///
/// Broadcasting is limited to bias adds: (m,n)+(n) over rows and (b,c,l)+(c)
/// over channels. Everything else requires exact shape agreement.
class Tape {
 public:
  using NodeId = std::uint32_t;

  // leaves
  NodeId constant(Array value);
  NodeId param(Array value);

  // primitives
  NodeId matmul(NodeId a, NodeId b);  // (m,k)x(k,n) -> (m,n)
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  NodeId scale(NodeId a, double c);
  NodeId concat(const std::vector<NodeId>& parts, std::size_t axis);
  NodeId slice(NodeId a, std::size_t axis, std::size_t start, std::size_t len);
  NodeId reshape(NodeId a, std::vector<std::size_t> new_shape);  // same element count
  NodeId relu(NodeId a);
  NodeId tanh(NodeId a);
  NodeId cubic(NodeId a);        // x^3 elementwise
  NodeId square_norm(NodeId a);  // sum of squares -> {1}
  NodeId sum(NodeId a);          // sum of elements -> {1}
  // x: (B, C_in, L), w: (C_out, C_in, K) -> (B, C_out, L_out)
  NodeId conv1d(NodeId x, NodeId w, std::size_t padding, std::size_t stride);
  NodeId mse(NodeId pred, NodeId target);  // mean squared difference -> {1}

  const Array& value(NodeId id) const { return nodes_[id].value; }
  std::size_t node_count() const { return nodes_.size(); }

  /// Reverse sweep from a scalar node. Gradients of earlier sweeps are discarded.
  void backward(NodeId loss);
  /// Gradient of the last backward() target w.r.t. this node's value.
  const Array& grad(NodeId id) const;

  static std::size_t conv1d_output_len(std::size_t len, std::size_t kernel, std::size_t padding,
                                       std::size_t stride);

 private:
  enum class Op : std::uint8_t {
    Leaf,
    MatMul,
    Add,
    Mul,
    Scale,
    Concat,
    Slice,
    Reshape,
    Relu,
    Tanh,
    Cubic,
    SquareNorm,
    Sum,
    Conv1d,
    Mse,
  };

  struct Node {
    Op op = Op::Leaf;
    std::vector<NodeId> inputs;
    Array value;
    bool requires_grad = false;
    double scalar = 0.0;                     // Scale factor
    std::size_t axis = 0, start = 0, len = 0;  // Slice / Concat axis
    std::size_t padding = 0, stride = 0;     // Conv1d
  };

  NodeId push(Node n);
  const Node& node(NodeId id) const { return nodes_[id]; }
  Array& grad_buf(NodeId id);

  std::vector<Node> nodes_;
  std::vector<Array> grads_;
  Array empty_grad_;
};

}  // namespace swarmsid
