#include "steinmetz/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "steinmetz/errors.hpp"
#include "steinmetz/signal.hpp"

namespace steinmetz {

namespace {

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + " expects a rank-2 tensor, got " +
                         shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

Tape& common_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw ContractError("operands recorded on different tapes");
  return a.tape();
}

Tape::Node make_node(Op op, std::vector<NodeId> inputs, Tensor value) {
  Tape::Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  return n;
}

// c[m x n] += a[m x k] * b[k x n]
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

// c[m x n] += a[m x k] * b[n x k]^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      c[i * n + j] += acc;
    }
  }
}

// c[k x n] += a[m x k]^T * b[m x n]
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double api = a[i * k + p];
      if (api == 0.0) continue;
      double* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += api * bi[j];
    }
  }
}

void accumulate(std::vector<double>& dst, std::span<const double> src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Var Tape::variable(Tensor value) {
  Node n = make_node(Op::Leaf, {}, std::move(value));
  n.requires_grad = true;
  return record(std::move(n));
}

Var Tape::constant(Tensor value) { return record(make_node(Op::Leaf, {}, std::move(value))); }

Var Tape::record(Node node) {
  for (NodeId in : node.inputs) {
    if (in >= nodes_.size()) throw ContractError("node input refers to a later node");
    node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  }
  nodes_.push_back(std::move(node));
  grads_.clear();
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::grad(NodeId id) const {
  if (grads_.empty()) throw ContractError("gradients requested before backward()");
  return grads_.at(id);
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw ContractError("loss belongs to another tape");
  const NodeId root = loss.id();
  if (nodes_.at(root).value.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        shape_string(nodes_[root].value.shape()));
  }

  std::vector<std::vector<double>> g(root + 1);
  for (NodeId i = 0; i <= root; ++i) g[i].assign(nodes_[i].value.size(), 0.0);
  g[root][0] = 1.0;

  auto wants = [&](NodeId id) { return nodes_[id].requires_grad; };

  for (NodeId step = root + 1; step-- > 0;) {
    const Node& n = nodes_[step];
    if (!n.requires_grad || n.op == Op::Leaf) continue;
    const std::vector<double>& up = g[step];
    const auto& in = n.inputs;

    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul: {
        const Tensor& a = nodes_[in[0]].value;
        const Tensor& b = nodes_[in[1]].value;
        const std::size_t m = a.rows(), k = a.cols(), cols = b.cols();
        if (wants(in[0])) gemm_nt(up.data(), b.data().data(), g[in[0]].data(), m, cols, k);
        if (wants(in[1])) gemm_tn(a.data().data(), up.data(), g[in[1]].data(), m, k, cols);
        break;
      }
      case Op::Linear: {
        const Tensor& x = nodes_[in[0]].value;
        const Tensor& w = nodes_[in[1]].value;
        const std::size_t batch = x.rows(), fan_in = x.cols(), fan_out = w.rows();
        if (wants(in[0])) gemm_nn(up.data(), w.data().data(), g[in[0]].data(), batch, fan_out, fan_in);
        if (wants(in[1])) gemm_tn(up.data(), x.data().data(), g[in[1]].data(), batch, fan_out, fan_in);
        if (wants(in[2])) {
          auto& gb = g[in[2]];
          for (std::size_t r = 0; r < batch; ++r)
            for (std::size_t c = 0; c < fan_out; ++c) gb[c] += up[r * fan_out + c];
        }
        break;
      }
      case Op::Add:
        if (wants(in[0])) accumulate(g[in[0]], up);
        if (wants(in[1])) accumulate(g[in[1]], up);
        break;
      case Op::Sub:
        if (wants(in[0])) accumulate(g[in[0]], up);
        if (wants(in[1])) {
          auto& gb = g[in[1]];
          for (std::size_t i = 0; i < up.size(); ++i) gb[i] -= up[i];
        }
        break;
      case Op::Scale: {
        auto& ga = g[in[0]];
        for (std::size_t i = 0; i < up.size(); ++i) ga[i] += n.scalar * up[i];
        break;
      }
      case Op::Relu: {
        const auto x = nodes_[in[0]].value.data();
        auto& gx = g[in[0]];
        for (std::size_t i = 0; i < up.size(); ++i)
          if (x[i] > 0.0) gx[i] += up[i];
        break;
      }
      case Op::Concat: {
        const Tensor& a = nodes_[in[0]].value;
        const Tensor& b = nodes_[in[1]].value;
        if (n.index == 0) {
          if (wants(in[0])) for (std::size_t i = 0; i < a.size(); ++i) g[in[0]][i] += up[i];
          if (wants(in[1])) for (std::size_t i = 0; i < b.size(); ++i) g[in[1]][i] += up[a.size() + i];
        } else {
          const std::size_t rows = a.rows(), ca = a.cols(), cb = b.cols(), cw = ca + cb;
          for (std::size_t r = 0; r < rows; ++r) {
            if (wants(in[0]))
              for (std::size_t c = 0; c < ca; ++c) g[in[0]][r * ca + c] += up[r * cw + c];
            if (wants(in[1]))
              for (std::size_t c = 0; c < cb; ++c) g[in[1]][r * cb + c] += up[r * cw + ca + c];
          }
        }
        break;
      }
      case Op::SliceCols: {
        const Tensor& x = nodes_[in[0]].value;
        const std::size_t rows = x.rows(), cx = x.cols(), width = n.value.cols();
        auto& gx = g[in[0]];
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < width; ++c) gx[r * cx + n.index + c] += up[r * width + c];
        break;
      }
      case Op::MeanCenterRows: {
        const std::size_t rows = n.value.rows(), cols = n.value.cols();
        auto& gx = g[in[0]];
        for (std::size_t r = 0; r < rows; ++r) {
          double row_mean = 0.0;
          for (std::size_t c = 0; c < cols; ++c) row_mean += up[r * cols + c];
          row_mean /= static_cast<double>(cols);
          for (std::size_t c = 0; c < cols; ++c) gx[r * cols + c] += up[r * cols + c] - row_mean;
        }
        break;
      }
      case Op::Sum: {
        auto& gx = g[in[0]];
        for (double& v : gx) v += up[0];
        break;
      }
      case Op::Mean: {
        auto& gx = g[in[0]];
        const double share = up[0] / static_cast<double>(gx.size());
        for (double& v : gx) v += share;
        break;
      }
      case Op::HilbertRows: {
        const std::size_t rows = n.value.rows(), cols = n.value.cols();
        auto& gx = g[in[0]];
        for (std::size_t r = 0; r < rows; ++r) {
          const std::vector<double> back = signal::hilbert_freq_transpose(
              std::span<const double>(up).subspan(r * cols, cols));
          for (std::size_t c = 0; c < cols; ++c) gx[r * cols + c] += back[c];
        }
        break;
      }
      case Op::Mse: {
        const auto p = nodes_[in[0]].value.data();
        const auto t = nodes_[in[1]].value.data();
        const double factor = 2.0 * up[0] / static_cast<double>(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
          const double d = factor * (p[i] - t[i]);
          if (wants(in[0])) g[in[0]][i] += d;
          if (wants(in[1])) g[in[1]][i] -= d;
        }
        break;
      }
      case Op::CrossEntropy: {
        const std::size_t rows = nodes_[in[0]].value.rows(), k = nodes_[in[0]].value.cols();
        const double factor = up[0] / static_cast<double>(rows);
        auto& gx = g[in[0]];
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < k; ++c) {
            const double target = (c == n.labels[r]) ? 1.0 : 0.0;
            gx[r * k + c] += factor * (n.saved[r * k + c] - target);
          }
        }
        break;
      }
      case Op::ComplexMagnitude: {
        const auto re = nodes_[in[0]].value.data();
        const auto im = nodes_[in[1]].value.data();
        const auto mag = n.value.data();
        for (std::size_t i = 0; i < up.size(); ++i) {
          if (wants(in[0])) g[in[0]][i] += up[i] * re[i] / mag[i];
          if (wants(in[1])) g[in[1]][i] += up[i] * im[i] / mag[i];
        }
        break;
      }
    }
  }

  grads_.clear();
  grads_.reserve(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (i <= root) {
      grads_.push_back(Tensor::adopt(nodes_[i].value.shape(), std::move(g[i])));
    } else {
      grads_.push_back(Tensor::zeros(nodes_[i].value.shape()));
    }
  }
}

Var matmul(Var a, Var b) {
  Tape& tape = common_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(av, "matmul");
  require_rank2(bv, "matmul");
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul inner dimensions differ: " + shape_string(av.shape()) + " * " +
                         shape_string(bv.shape()));
  }
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  std::vector<double> out(m * n, 0.0);
  gemm_nn(av.data().data(), bv.data().data(), out.data(), m, k, n);
  return tape.record(make_node(Op::MatMul, {a.id(), b.id()}, Tensor::adopt({m, n}, std::move(out))));
}

Var linear(Var x, Var weight, Var bias) {
  Tape& tape = common_tape(x, weight);
  common_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  const Tensor& bv = bias.value();
  require_rank2(xv, "linear");
  require_rank2(wv, "linear");
  if (wv.cols() != xv.cols() || bv.rank() != 1 || bv.size() != wv.rows()) {
    throw DimensionError("linear: input " + shape_string(xv.shape()) + ", weight " +
                         shape_string(wv.shape()) + ", bias " + shape_string(bv.shape()));
  }
  const std::size_t batch = xv.rows(), fan_in = xv.cols(), fan_out = wv.rows();
  std::vector<double> out(batch * fan_out);
  for (std::size_t r = 0; r < batch; ++r)
    std::copy(bv.data().begin(), bv.data().end(), out.begin() + static_cast<std::ptrdiff_t>(r * fan_out));
  gemm_nt(xv.data().data(), wv.data().data(), out.data(), batch, fan_in, fan_out);
  return tape.record(make_node(Op::Linear, {x.id(), weight.id(), bias.id()},
                               Tensor::adopt({batch, fan_out}, std::move(out))));
}

Var linear(Var x, Var weight) {
  const Tensor& wv = weight.value();
  require_rank2(wv, "linear");
  return linear(x, weight, weight.tape().constant(Tensor::zeros({wv.rows()})));
}

Var add(Var a, Var b) {
  Tape& tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  const auto av = a.value().data();
  const auto bv = b.value().data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return tape.record(make_node(Op::Add, {a.id(), b.id()}, Tensor::adopt(a.value().shape(), std::move(out))));
}

Var sub(Var a, Var b) {
  Tape& tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  const auto av = a.value().data();
  const auto bv = b.value().data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return tape.record(make_node(Op::Sub, {a.id(), b.id()}, Tensor::adopt(a.value().shape(), std::move(out))));
}

Var scale(Var a, double factor) {
  const auto av = a.value().data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * av[i];
  Tape::Node n = make_node(Op::Scale, {a.id()}, Tensor::adopt(a.value().shape(), std::move(out)));
  n.scalar = factor;
  return a.tape().record(std::move(n));
}

Var relu(Var x) {
  const auto xv = x.value().data();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  return x.tape().record(make_node(Op::Relu, {x.id()}, Tensor::adopt(x.value().shape(), std::move(out))));
}

Var concat(Var a, Var b, std::size_t axis) {
  Tape& tape = common_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(av, "concat");
  require_rank2(bv, "concat");
  std::vector<double> out;
  out.reserve(av.size() + bv.size());
  std::vector<std::size_t> shape;
  if (axis == 0) {
    if (av.cols() != bv.cols()) throw DimensionError("concat(axis=0): column counts differ");
    out.insert(out.end(), av.data().begin(), av.data().end());
    out.insert(out.end(), bv.data().begin(), bv.data().end());
    shape = {av.rows() + bv.rows(), av.cols()};
  } else if (axis == 1) {
    if (av.rows() != bv.rows()) throw DimensionError("concat(axis=1): row counts differ");
    for (std::size_t r = 0; r < av.rows(); ++r) {
      out.insert(out.end(), av.row(r).begin(), av.row(r).end());
      out.insert(out.end(), bv.row(r).begin(), bv.row(r).end());
    }
    shape = {av.rows(), av.cols() + bv.cols()};
  } else {
    throw DimensionError("concat axis must be 0 or 1");
  }
  Tape::Node n = make_node(Op::Concat, {a.id(), b.id()}, Tensor::adopt(std::move(shape), std::move(out)));
  n.index = axis;
  return tape.record(std::move(n));
}

Var slice_cols(Var x, std::size_t offset, std::size_t width) {
  const Tensor& xv = x.value();
  require_rank2(xv, "slice_cols");
  if (offset + width > xv.cols()) {
    throw DimensionError("slice_cols [" + std::to_string(offset) + ", " +
                         std::to_string(offset + width) + ") exceeds " + std::to_string(xv.cols()) +
                         " columns");
  }
  std::vector<double> out;
  out.reserve(xv.rows() * width);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    const auto row = xv.row(r).subspan(offset, width);
    out.insert(out.end(), row.begin(), row.end());
  }
  Tape::Node n = make_node(Op::SliceCols, {x.id()}, Tensor::adopt({xv.rows(), width}, std::move(out)));
  n.index = offset;
  return x.tape().record(std::move(n));
}

std::pair<Var, Var> split_cols(Var x, std::size_t at) {
  const std::size_t cols = x.value().cols();
  if (at > cols) throw DimensionError("split_cols point beyond the last column");
  return {slice_cols(x, 0, at), slice_cols(x, at, cols - at)};
}

Var mean_center_rows(Var x) {
  const Tensor& xv = x.value();
  require_rank2(xv, "mean_center_rows");
  const std::size_t rows = xv.rows(), cols = xv.cols();
  std::vector<double> out(xv.data().begin(), xv.data().end());
  for (std::size_t r = 0; r < rows; ++r) {
    double row_mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) row_mean += out[r * cols + c];
    row_mean /= static_cast<double>(cols);
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] -= row_mean;
  }
  return x.tape().record(make_node(Op::MeanCenterRows, {x.id()}, Tensor::adopt({rows, cols}, std::move(out))));
}

Var sum(Var x) {
  double acc = 0.0;
  for (double v : x.value().data()) acc += v;
  return x.tape().record(make_node(Op::Sum, {x.id()}, Tensor::adopt({1}, {acc})));
}

Var mean(Var x) {
  if (x.value().empty()) throw DimensionError("mean of an empty tensor");
  double acc = 0.0;
  for (double v : x.value().data()) acc += v;
  acc /= static_cast<double>(x.value().size());
  return x.tape().record(make_node(Op::Mean, {x.id()}, Tensor::adopt({1}, {acc})));
}

Var hilbert_rows(Var x) {
  const Tensor& xv = x.value();
  require_rank2(xv, "hilbert_rows");
  const std::size_t rows = xv.rows(), cols = xv.cols();
  std::vector<double> out;
  out.reserve(xv.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> h = signal::hilbert_freq(xv.row(r));
    out.insert(out.end(), h.begin(), h.end());
  }
  return x.tape().record(make_node(Op::HilbertRows, {x.id()}, Tensor::adopt({rows, cols}, std::move(out))));
}

Var mse(Var pred, Var target) {
  Tape& tape = common_tape(pred, target);
  require_same_shape(pred.value(), target.value(), "mse");
  const auto p = pred.value().data();
  const auto t = target.value().data();
  if (p.empty()) throw DimensionError("mse of empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - t[i]) * (p[i] - t[i]);
  acc /= static_cast<double>(p.size());
  return tape.record(make_node(Op::Mse, {pred.id(), target.id()}, Tensor::adopt({1}, {acc})));
}

Var cross_entropy(Var logits, std::span<const std::uint32_t> labels) {
  const Tensor& lv = logits.value();
  require_rank2(lv, "cross_entropy");
  const std::size_t rows = lv.rows(), k = lv.cols();
  if (labels.size() != rows) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(rows) + " rows");
  }
  if (rows == 0) throw DimensionError("cross_entropy of an empty batch");
  std::vector<double> probs(lv.size());
  double loss = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (labels[r] >= k) {
      throw DataError("label " + std::to_string(labels[r]) + " out of range for " +
                      std::to_string(k) + " classes");
    }
    const auto row = lv.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < k; ++c) denom += std::exp(row[c] - peak);
    const double log_denom = std::log(denom);
    for (std::size_t c = 0; c < k; ++c) probs[r * k + c] = std::exp(row[c] - peak - log_denom);
    loss -= row[labels[r]] - peak - log_denom;
  }
  loss /= static_cast<double>(rows);
  Tape::Node n = make_node(Op::CrossEntropy, {logits.id()}, Tensor::adopt({1}, {loss}));
  n.labels.assign(labels.begin(), labels.end());
  n.saved = std::move(probs);
  return logits.tape().record(std::move(n));
}

Var complex_magnitude(Var re, Var im, double eps) {
  Tape& tape = common_tape(re, im);
  require_same_shape(re.value(), im.value(), "complex_magnitude");
  if (!(eps > 0.0)) throw ContractError("complex_magnitude needs a positive epsilon");
  const auto a = re.value().data();
  const auto b = im.value().data();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(a[i] * a[i] + b[i] * b[i] + eps);
  Tape::Node n = make_node(Op::ComplexMagnitude, {re.id(), im.id()},
                           Tensor::adopt(re.value().shape(), std::move(out)));
  n.scalar = eps;
  return tape.record(std::move(n));
}

}  // namespace steinmetz
