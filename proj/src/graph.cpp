#include "ssmri/graph.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ssmri/fft.hpp"
#include "ssmri/log.hpp"

namespace ssmri {

namespace {

void require_same_graph(Var a, Var b, const char* what) {
  if (a.graph == nullptr || a.graph != b.graph)
    throw std::invalid_argument(std::string(what) + ": operands belong to different graphs");
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
}

double softplus_val(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void conv2d_forward(Tensor& out, const Tensor& x, const Tensor& w, const Tensor& b) {
  const int cout = w.dim(0), cin = w.dim(1), k = w.dim(2);
  const int h = x.dim(1), ww = x.dim(2);
  const int c = (k - 1) / 2;
  for (int oc = 0; oc < cout; ++oc) {
    const double bias = b[static_cast<std::size_t>(oc)];
    for (int y = 0; y < h; ++y) {
      for (int xp = 0; xp < ww; ++xp) {
        double acc = bias;
        for (int ic = 0; ic < cin; ++ic) {
          for (int p = 0; p < k; ++p) {
            const int iy = y + p - c;
            if (iy < 0 || iy >= h) continue;
            for (int q = 0; q < k; ++q) {
              const int ix = xp + q - c;
              if (ix < 0 || ix >= ww) continue;
              acc += w.at(oc, ic, p, q) * x.at(ic, iy, ix);
            }
          }
        }
        out.at(oc, y, xp) = acc;
      }
    }
  }
}

void conv2d_backward(const Tensor& gout, const Tensor& x, const Tensor& w, Tensor& gx, Tensor& gw,
                     Tensor& gb) {
  const int cout = w.dim(0), cin = w.dim(1), k = w.dim(2);
  const int h = x.dim(1), ww = x.dim(2);
  const int c = (k - 1) / 2;
  for (int oc = 0; oc < cout; ++oc) {
    double bsum = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int xp = 0; xp < ww; ++xp) {
        const double g = gout.at(oc, y, xp);
        bsum += g;
        for (int ic = 0; ic < cin; ++ic) {
          for (int p = 0; p < k; ++p) {
            const int iy = y + p - c;
            if (iy < 0 || iy >= h) continue;
            for (int q = 0; q < k; ++q) {
              const int ix = xp + q - c;
              if (ix < 0 || ix >= ww) continue;
              gw.at(oc, ic, p, q) += g * x.at(ic, iy, ix);
              gx.at(ic, iy, ix) += g * w.at(oc, ic, p, q);
            }
          }
        }
      }
    }
    gb[static_cast<std::size_t>(oc)] += bsum;
  }
}

}  // namespace

const Tensor& Var::value() const { return graph->node(id).value; }
const Tensor& Var::grad() const { return graph->node(id).grad; }

Var Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  const auto id = static_cast<std::int32_t>(nodes_.size() - 1);
  compute(nodes_.size() - 1);
  return Var{this, id};
}

Var Graph::input(Tensor v) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(v);
  return push(std::move(n));
}

Var Graph::param(Tensor v) {
  Node n;
  n.op = Op::kParam;
  n.value = std::move(v);
  return push(std::move(n));
}

void Graph::set_leaf(Var leaf, Tensor v) {
  Tensor& cur = leaf_value(leaf);
  require_same_shape(cur, v, "set_leaf");
  cur = std::move(v);
}

Tensor& Graph::leaf_value(Var leaf) {
  if (leaf.graph != this) throw std::invalid_argument("leaf_value: foreign node");
  Node& n = node(leaf.id);
  if (n.op != Op::kInput && n.op != Op::kParam)
    throw std::invalid_argument("leaf_value: node is not a leaf");
  return n.value;
}

void Graph::forward() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) compute(i);
}

void Graph::compute(std::size_t i) {
  Node& n = nodes_[i];
  switch (n.op) {
    case Op::kInput:
    case Op::kParam:
      return;
    case Op::kAdd: {
      const Tensor& a = nodes_[n.in0].value;
      const Tensor& b = nodes_[n.in1].value;
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = a[e] + b[e];
      return;
    }
    case Op::kSub: {
      const Tensor& a = nodes_[n.in0].value;
      const Tensor& b = nodes_[n.in1].value;
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = a[e] - b[e];
      return;
    }
    case Op::kMul: {
      const Tensor& a = nodes_[n.in0].value;
      const Tensor& b = nodes_[n.in1].value;
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = a[e] * b[e];
      return;
    }
    case Op::kScale: {
      const Tensor& a = nodes_[n.in0].value;
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = n.cscale * a[e];
      return;
    }
    case Op::kSMul: {
      const Tensor& a = nodes_[n.in0].value;
      const double s = nodes_[n.in1].value[0];
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = s * a[e];
      return;
    }
    case Op::kRelu: {
      const Tensor& a = nodes_[n.in0].value;
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = a[e] > 0.0 ? a[e] : 0.0;
      return;
    }
    case Op::kSoftplus: {
      const Tensor& a = nodes_[n.in0].value;
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = softplus_val(a[e]);
      return;
    }
    case Op::kSoftThreshold: {
      const Tensor& x = nodes_[n.in0].value;
      const double theta = nodes_[n.in1].value[0];
      if (theta < 0.0)
        throw std::invalid_argument("soft_threshold: threshold must be non-negative, got " +
                                    std::to_string(theta));
      if (n.value.empty()) n.value = Tensor(x.shape());
      for (std::size_t e = 0; e < x.size(); ++e) {
        const double v = x[e];
        const double m = std::abs(v) - theta;
        n.value[e] = m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
      }
      return;
    }
    case Op::kConv2d: {
      const Tensor& x = nodes_[n.in0].value;
      const Tensor& w = nodes_[n.in1].value;
      const Tensor& b = nodes_[n.in2].value;
      if (n.value.empty()) n.value = Tensor({w.dim(0), x.dim(1), x.dim(2)});
      conv2d_forward(n.value, x, w, b);
      return;
    }
    case Op::kMaskedMse: {
      const Tensor& a = nodes_[n.in0].value;
      const Tensor& b = nodes_[n.in1].value;
      double acc = 0.0;
      for (std::size_t e = 0; e < a.size(); ++e) {
        const double d = a[e] - b[e];
        acc += n.cdata[e] * d * d;
      }
      if (n.value.empty()) n.value = Tensor({1});
      n.value[0] = acc * n.inv_count;
      return;
    }
    case Op::kSum: {
      const Tensor& a = nodes_[n.in0].value;
      double acc = 0.0;
      for (std::size_t e = 0; e < a.size(); ++e) acc += a[e];
      if (n.value.empty()) n.value = Tensor({1});
      n.value[0] = acc;
      return;
    }
    case Op::kFft2c:
      n.value = fft2_centered(nodes_[n.in0].value);
      return;
    case Op::kIfft2c:
      n.value = ifft2_centered(nodes_[n.in0].value);
      return;
    case Op::kCMul: {
      const Tensor& a = nodes_[n.in0].value;
      if (n.value.empty()) n.value = Tensor(a.shape());
      for (std::size_t e = 0; e < a.size(); ++e) n.value[e] = a[e] * n.cdata[e];
      return;
    }
  }
  throw std::logic_error("compute: unknown op");
}

void Graph::backward(Var root) {
  if (root.graph != this) throw std::invalid_argument("backward: foreign root");
  if (node(root.id).value.size() != 1)
    throw std::invalid_argument("backward: root must be scalar, got " +
                                shape_str(node(root.id).value.shape()));
  for (Node& n : nodes_) n.grad = Tensor(n.value.shape());
  nodes_[static_cast<std::size_t>(root.id)].grad[0] = 1.0;
  for (std::int32_t i = root.id; i >= 0; --i) accumulate(static_cast<std::size_t>(i));
}

void Graph::accumulate(std::size_t i) {
  Node& n = nodes_[i];
  const Tensor& g = n.grad;
  switch (n.op) {
    case Op::kInput:
    case Op::kParam:
      return;
    case Op::kAdd: {
      Tensor& ga = nodes_[n.in0].grad;
      Tensor& gb = nodes_[n.in1].grad;
      for (std::size_t e = 0; e < g.size(); ++e) {
        ga[e] += g[e];
        gb[e] += g[e];
      }
      return;
    }
    case Op::kSub: {
      Tensor& ga = nodes_[n.in0].grad;
      Tensor& gb = nodes_[n.in1].grad;
      for (std::size_t e = 0; e < g.size(); ++e) {
        ga[e] += g[e];
        gb[e] -= g[e];
      }
      return;
    }
    case Op::kMul: {
      const Tensor& a = nodes_[n.in0].value;
      const Tensor& b = nodes_[n.in1].value;
      Tensor& ga = nodes_[n.in0].grad;
      Tensor& gb = nodes_[n.in1].grad;
      for (std::size_t e = 0; e < g.size(); ++e) {
        ga[e] += g[e] * b[e];
        gb[e] += g[e] * a[e];
      }
      return;
    }
    case Op::kScale: {
      Tensor& ga = nodes_[n.in0].grad;
      for (std::size_t e = 0; e < g.size(); ++e) ga[e] += n.cscale * g[e];
      return;
    }
    case Op::kSMul: {
      const Tensor& a = nodes_[n.in0].value;
      const double s = nodes_[n.in1].value[0];
      Tensor& ga = nodes_[n.in0].grad;
      Tensor& gs = nodes_[n.in1].grad;
      double acc = 0.0;
      for (std::size_t e = 0; e < g.size(); ++e) {
        ga[e] += s * g[e];
        acc += a[e] * g[e];
      }
      gs[0] += acc;
      return;
    }
    case Op::kRelu: {
      const Tensor& a = nodes_[n.in0].value;
      Tensor& ga = nodes_[n.in0].grad;
      for (std::size_t e = 0; e < g.size(); ++e)
        if (a[e] > 0.0) ga[e] += g[e];
      return;
    }
    case Op::kSoftplus: {
      const Tensor& a = nodes_[n.in0].value;
      Tensor& ga = nodes_[n.in0].grad;
      for (std::size_t e = 0; e < g.size(); ++e) ga[e] += sigmoid(a[e]) * g[e];
      return;
    }
    case Op::kSoftThreshold: {
      const Tensor& x = nodes_[n.in0].value;
      const double theta = nodes_[n.in1].value[0];
      Tensor& gx = nodes_[n.in0].grad;
      Tensor& gt = nodes_[n.in1].grad;
      double tacc = 0.0;
      for (std::size_t e = 0; e < g.size(); ++e) {
        if (std::abs(x[e]) > theta) {
          gx[e] += g[e];
          tacc -= (x[e] > 0.0 ? 1.0 : -1.0) * g[e];
        }
      }
      gt[0] += tacc;
      return;
    }
    case Op::kConv2d: {
      conv2d_backward(g, nodes_[n.in0].value, nodes_[n.in1].value, nodes_[n.in0].grad,
                      nodes_[n.in1].grad, nodes_[n.in2].grad);
      return;
    }
    case Op::kMaskedMse: {
      const Tensor& a = nodes_[n.in0].value;
      const Tensor& b = nodes_[n.in1].value;
      Tensor& ga = nodes_[n.in0].grad;
      Tensor& gb = nodes_[n.in1].grad;
      const double gscale = 2.0 * g[0] * n.inv_count;
      for (std::size_t e = 0; e < a.size(); ++e) {
        const double d = gscale * n.cdata[e] * (a[e] - b[e]);
        ga[e] += d;
        gb[e] -= d;
      }
      return;
    }
    case Op::kSum: {
      Tensor& ga = nodes_[n.in0].grad;
      for (std::size_t e = 0; e < ga.size(); ++e) ga[e] += g[0];
      return;
    }
    case Op::kFft2c: {
      const Tensor t = ifft2_centered(g);  // transform is real-orthogonal
      Tensor& ga = nodes_[n.in0].grad;
      for (std::size_t e = 0; e < t.size(); ++e) ga[e] += t[e];
      return;
    }
    case Op::kIfft2c: {
      const Tensor t = fft2_centered(g);
      Tensor& ga = nodes_[n.in0].grad;
      for (std::size_t e = 0; e < t.size(); ++e) ga[e] += t[e];
      return;
    }
    case Op::kCMul: {
      Tensor& ga = nodes_[n.in0].grad;
      for (std::size_t e = 0; e < g.size(); ++e) ga[e] += n.cdata[e] * g[e];
      return;
    }
  }
  throw std::logic_error("accumulate: unknown op");
}

namespace {

Var binary_op(Var a, Var b, Op op, const char* name) {
  require_same_graph(a, b, name);
  require_same_shape(a.value(), b.value(), name);
  Node n;
  n.op = op;
  n.in0 = a.id;
  n.in1 = b.id;
  return a.graph->push(std::move(n));
}

Var unary_op(Var a, Op op, const char* name) {
  if (a.graph == nullptr) throw std::invalid_argument(std::string(name) + ": null operand");
  Node n;
  n.op = op;
  n.in0 = a.id;
  return a.graph->push(std::move(n));
}

}  // namespace

Var add(Var a, Var b) { return binary_op(a, b, Op::kAdd, "add"); }
Var sub(Var a, Var b) { return binary_op(a, b, Op::kSub, "sub"); }
Var mul(Var a, Var b) { return binary_op(a, b, Op::kMul, "mul"); }

Var scale(Var a, double c) {
  if (a.graph == nullptr) throw std::invalid_argument("scale: null operand");
  Node n;
  n.op = Op::kScale;
  n.in0 = a.id;
  n.cscale = c;
  return a.graph->push(std::move(n));
}

Var smul(Var a, Var s) {
  require_same_graph(a, s, "smul");
  if (s.value().size() != 1)
    throw std::invalid_argument("smul: scale operand must be scalar, got " +
                                shape_str(s.value().shape()));
  Node n;
  n.op = Op::kSMul;
  n.in0 = a.id;
  n.in1 = s.id;
  return a.graph->push(std::move(n));
}

Var relu(Var a) { return unary_op(a, Op::kRelu, "relu"); }
Var softplus(Var a) { return unary_op(a, Op::kSoftplus, "softplus"); }

Var soft_threshold(Var x, Var theta) {
  require_same_graph(x, theta, "soft_threshold");
  if (theta.value().size() != 1)
    throw std::invalid_argument("soft_threshold: threshold must be scalar, got " +
                                shape_str(theta.value().shape()));
  Node n;
  n.op = Op::kSoftThreshold;
  n.in0 = x.id;
  n.in1 = theta.id;
  return x.graph->push(std::move(n));  // value check happens in compute
}

Var conv2d(Var x, Var weight, Var bias) {
  require_same_graph(x, weight, "conv2d");
  require_same_graph(x, bias, "conv2d");
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  const Tensor& bv = bias.value();
  if (xv.ndim() != 3)
    throw std::invalid_argument("conv2d: input must be CxHxW, got " + shape_str(xv.shape()));
  if (wv.ndim() != 4)
    throw std::invalid_argument("conv2d: kernel must be CoutxCinxKxK, got " + shape_str(wv.shape()));
  if (wv.dim(2) != wv.dim(3) || wv.dim(2) % 2 == 0)
    throw std::invalid_argument("conv2d: kernel must be square with odd size, got " +
                                shape_str(wv.shape()));
  if (wv.dim(1) != xv.dim(0))
    throw std::invalid_argument("conv2d: kernel expects " + std::to_string(wv.dim(1)) +
                                " input channels (kernel dim 1) but input has " +
                                std::to_string(xv.dim(0)) + " (input dim 0)");
  if (bv.ndim() != 1 || bv.dim(0) != wv.dim(0))
    throw std::invalid_argument("conv2d: bias must have " + std::to_string(wv.dim(0)) +
                                " entries (kernel dim 0), got " + shape_str(bv.shape()));
  Node n;
  n.op = Op::kConv2d;
  n.in0 = x.id;
  n.in1 = weight.id;
  n.in2 = bias.id;
  return x.graph->push(std::move(n));
}

Var masked_mse(Var a, Var b, const Tensor& mask) {
  require_same_graph(a, b, "masked_mse");
  const Tensor& av = a.value();
  require_same_shape(av, b.value(), "masked_mse");

  Tensor expanded;
  if (mask.same_shape(av)) {
    expanded = mask;
  } else if (mask.ndim() + 1 == av.ndim()) {
    // broadcast over the leading (channel) dimension
    for (int i = 0; i < mask.ndim(); ++i)
      if (mask.dim(i) != av.dim(i + 1))
        throw std::invalid_argument("masked_mse: mask shape " + shape_str(mask.shape()) +
                                    " does not broadcast over " + shape_str(av.shape()));
    expanded = Tensor(av.shape());
    const std::size_t plane = mask.size();
    for (int ch = 0; ch < av.dim(0); ++ch)
      for (std::size_t e = 0; e < plane; ++e)
        expanded[static_cast<std::size_t>(ch) * plane + e] = mask[e];
  } else {
    throw std::invalid_argument("masked_mse: mask shape " + shape_str(mask.shape()) +
                                " incompatible with " + shape_str(av.shape()));
  }

  std::size_t nnz = 0;
  for (std::size_t e = 0; e < expanded.size(); ++e) {
    if (expanded[e] != 0.0 && expanded[e] != 1.0)
      throw std::invalid_argument("masked_mse: mask must be binary");
    nnz += expanded[e] != 0.0 ? 1 : 0;
  }
  if (nnz == 0) log_warn("masked_mse: mask selects no entries; loss is 0");

  Node n;
  n.op = Op::kMaskedMse;
  n.in0 = a.id;
  n.in1 = b.id;
  n.cdata = std::move(expanded);
  n.inv_count = nnz == 0 ? 0.0 : 1.0 / static_cast<double>(nnz);
  return a.graph->push(std::move(n));
}

Var sum(Var a) { return unary_op(a, Op::kSum, "sum"); }

Var fft2c(Var x) {
  // shape/size validation happens inside fft2_centered on first compute
  return unary_op(x, Op::kFft2c, "fft2c");
}

Var ifft2c(Var x) { return unary_op(x, Op::kIfft2c, "ifft2c"); }

Var cmul(Var a, const Tensor& c) {
  if (a.graph == nullptr) throw std::invalid_argument("cmul: null operand");
  require_same_shape(a.value(), c, "cmul");
  Node n;
  n.op = Op::kCMul;
  n.in0 = a.id;
  n.cdata = c;
  return a.graph->push(std::move(n));
}

}  // namespace ssmri
