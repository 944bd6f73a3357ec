#pragma once

#include <cstdint>
#include <vector>

#include "ssmri/tensor.hpp"

namespace ssmri {

// Reverse-mode computation graph. Nodes are appended in creation order,
// which is also the topological order; values are computed eagerly as
// nodes are built, so a fresh graph is already forward-evaluated.
// forward() re-evaluates everything (after leaf values were replaced),
// backward(root) fills every node's grad with d(root)/d(node).

enum class Op : std::uint8_t {
  kInput,
  kParam,
  kAdd,
  kSub,
  kMul,
  kScale,          // constant factor
  kSMul,           // scalar node × tensor node
  kRelu,
  kSoftplus,
  kSoftThreshold,  // (x, theta) with scalar theta >= 0
  kConv2d,         // (x, weight, bias), odd kernel, same zero padding
  kMaskedMse,      // (a, b) with constant binary mask
  kSum,
  kFft2c,
  kIfft2c,
  kCMul,           // constant tensor multiply
};

struct Node {
  Op op = Op::kInput;
  std::int32_t in0 = -1, in1 = -1, in2 = -1;
  double cscale = 1.0;     // kScale factor
  Tensor cdata;            // kCMul multiplier / kMaskedMse expanded mask
  double inv_count = 0.0;  // kMaskedMse: 1/max(1, nnz)
  Tensor value;
  Tensor grad;
};

class Graph;

// Cheap handle to a node; valid as long as the graph is alive.
struct Var {
  Graph* graph = nullptr;
  std::int32_t id = -1;
  const Tensor& value() const;
  const Tensor& grad() const;
};

class Graph {
public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var input(Tensor v);
  Var param(Tensor v);

  // Replaces a leaf's value (e.g. for finite-difference probing); call
  // forward() afterwards to propagate.
  void set_leaf(Var leaf, Tensor v);
  Tensor& leaf_value(Var leaf);

  void forward();
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }
  Node& node(std::int32_t id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }

private:
  Var push(Node n);
  void compute(std::size_t i);
  void accumulate(std::size_t i);

  std::vector<Node> nodes_;

  friend Var add(Var, Var);
  friend Var sub(Var, Var);
  friend Var mul(Var, Var);
  friend Var scale(Var, double);
  friend Var smul(Var, Var);
  friend Var relu(Var);
  friend Var softplus(Var);
  friend Var soft_threshold(Var, Var);
  friend Var conv2d(Var, Var, Var);
  friend Var masked_mse(Var, Var, const Tensor&);
  friend Var sum(Var);
  friend Var fft2c(Var);
  friend Var ifft2c(Var);
  friend Var cmul(Var, const Tensor&);
};

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double c);
Var smul(Var a, Var s);  // s is a scalar node broadcast over a
Var relu(Var a);
Var softplus(Var a);
Var soft_threshold(Var x, Var theta);
Var conv2d(Var x, Var weight, Var bias);
// mask must be binary, either the same shape as a or matching a with the
// leading (channel) dimension dropped; normalized by selected entry count
Var masked_mse(Var a, Var b, const Tensor& mask);
Var sum(Var a);
Var fft2c(Var x);
Var ifft2c(Var x);
Var cmul(Var a, const Tensor& c);

}  // namespace ssmri
