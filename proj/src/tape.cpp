#include "swarmsid/tape.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace swarmsid {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using CMatMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

[[noreturn]] void shape_fail(const char* op, const Array& a, const Array& b) {
  std::ostringstream os;
  os << op << ": incompatible shapes " << a.shape_str() << " and " << b.shape_str();
  throw ShapeError(os.str());
}

[[noreturn]] void shape_fail(const char* op, const Array& a) {
  std::ostringstream os;
  os << op << ": unsupported shape " << a.shape_str();
  throw ShapeError(os.str());
}

}  // namespace

Tape::NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::constant(Array value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  n.requires_grad = false;
  return push(std::move(n));
}

Tape::NodeId Tape::param(Array value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  const Array& va = value(a);
  const Array& vb = value(b);
  if (va.rank() != 2 || vb.rank() != 2 || va.cols() != vb.rows()) shape_fail("matmul", va, vb);
  Node n;
  n.op = Op::MatMul;
  n.inputs = {a, b};
  n.value = Array({va.rows(), vb.cols()});
  {
    CMatMap ma(va.data.data(), static_cast<Eigen::Index>(va.rows()),
               static_cast<Eigen::Index>(va.cols()));
    CMatMap mb(vb.data.data(), static_cast<Eigen::Index>(vb.rows()),
               static_cast<Eigen::Index>(vb.cols()));
    MatMap mc(n.value.data.data(), static_cast<Eigen::Index>(va.rows()),
              static_cast<Eigen::Index>(vb.cols()));
    mc.noalias() = ma * mb;
  }
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  const Array& va = value(a);
  const Array& vb = value(b);
  Node n;
  n.op = Op::Add;
  n.inputs = {a, b};
  if (va.same_shape(vb)) {
    n.value = va;
    for (std::size_t i = 0; i < vb.size(); ++i) n.value.data[i] += vb.data[i];
  } else if (va.rank() == 2 && vb.rank() == 1 && vb.dim(0) == va.cols()) {
    // row-bias broadcast
    n.value = va;
    for (std::size_t r = 0; r < va.rows(); ++r)
      for (std::size_t c = 0; c < va.cols(); ++c) n.value.at(r, c) += vb.data[c];
  } else if (va.rank() == 3 && vb.rank() == 1 && vb.dim(0) == va.dim(1)) {
    // channel-bias broadcast over (B, C, L)
    n.value = va;
    const std::size_t L = va.dim(2);
    for (std::size_t bi = 0; bi < va.dim(0); ++bi)
      for (std::size_t c = 0; c < va.dim(1); ++c)
        for (std::size_t l = 0; l < L; ++l) n.value.data[(bi * va.dim(1) + c) * L + l] += vb.data[c];
  } else {
    shape_fail("add", va, vb);
  }
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  const Array& va = value(a);
  const Array& vb = value(b);
  if (!va.same_shape(vb)) shape_fail("mul", va, vb);
  Node n;
  n.op = Op::Mul;
  n.inputs = {a, b};
  n.value = va;
  for (std::size_t i = 0; i < vb.size(); ++i) n.value.data[i] *= vb.data[i];
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId a, double c) {
  Node n;
  n.op = Op::Scale;
  n.inputs = {a};
  n.scalar = c;
  n.value = value(a);
  for (double& x : n.value.data) x *= c;
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::concat(const std::vector<NodeId>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Array& first = value(parts[0]);
  if (first.rank() == 1) {
    if (axis != 0) shape_fail("concat", first);
    std::size_t total = 0;
    for (NodeId p : parts) {
      if (value(p).rank() != 1) shape_fail("concat", first, value(p));
      total += value(p).size();
    }
    Node n;
    n.op = Op::Concat;
    n.inputs = parts;
    n.axis = 0;
    n.value = Array({total});
    std::size_t off = 0;
    for (NodeId p : parts) {
      const Array& v = value(p);
      std::copy(v.data.begin(), v.data.end(), n.value.data.begin() + static_cast<long>(off));
      off += v.size();
    }
    for (NodeId p : parts) n.requires_grad = n.requires_grad || node(p).requires_grad;
    return push(std::move(n));
  }
  if (first.rank() != 2 || axis > 1) shape_fail("concat", first);
  std::size_t rows = first.rows(), cols = first.cols();
  std::size_t total = 0;
  for (NodeId p : parts) {
    const Array& v = value(p);
    if (v.rank() != 2 || (axis == 0 ? v.cols() != cols : v.rows() != rows))
      shape_fail("concat", first, v);
    total += v.dim(axis);
  }
  Node n;
  n.op = Op::Concat;
  n.inputs = parts;
  n.axis = axis;
  n.value = Array(axis == 0 ? std::vector<std::size_t>{total, cols}
                            : std::vector<std::size_t>{rows, total});
  std::size_t off = 0;
  for (NodeId p : parts) {
    const Array& v = value(p);
    if (axis == 0) {
      std::copy(v.data.begin(), v.data.end(), n.value.data.begin() + static_cast<long>(off * cols));
      off += v.rows();
    } else {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < v.cols(); ++c) n.value.at(r, off + c) = v.at(r, c);
      off += v.cols();
    }
  }
  for (NodeId p : parts) n.requires_grad = n.requires_grad || node(p).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::slice(NodeId a, std::size_t axis, std::size_t start, std::size_t len) {
  const Array& va = value(a);
  if (va.rank() > 2 || axis >= va.rank() || start + len > va.dim(axis) || len == 0)
    shape_fail("slice", va);
  Node n;
  n.op = Op::Slice;
  n.inputs = {a};
  n.axis = axis;
  n.start = start;
  n.len = len;
  if (va.rank() == 1) {
    n.value = Array({len});
    std::copy(va.data.begin() + static_cast<long>(start),
              va.data.begin() + static_cast<long>(start + len), n.value.data.begin());
  } else if (axis == 0) {
    n.value = Array({len, va.cols()});
    std::copy(va.data.begin() + static_cast<long>(start * va.cols()),
              va.data.begin() + static_cast<long>((start + len) * va.cols()),
              n.value.data.begin());
  } else {
    n.value = Array({va.rows(), len});
    for (std::size_t r = 0; r < va.rows(); ++r)
      for (std::size_t c = 0; c < len; ++c) n.value.at(r, c) = va.at(r, start + c);
  }
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::reshape(NodeId a, std::vector<std::size_t> new_shape) {
  const Array& va = value(a);
  if (shape_size(new_shape) != va.size())
    throw ShapeError("reshape: element count mismatch between " + va.shape_str() + " and target");
  Node n;
  n.op = Op::Reshape;
  n.inputs = {a};
  n.value = Array(std::move(new_shape), va.data);
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::relu(NodeId a) {
  Node n;
  n.op = Op::Relu;
  n.inputs = {a};
  n.value = value(a);
  for (double& x : n.value.data) x = x > 0.0 ? x : 0.0;
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::tanh(NodeId a) {
  Node n;
  n.op = Op::Tanh;
  n.inputs = {a};
  n.value = value(a);
  for (double& x : n.value.data) x = std::tanh(x);
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::cubic(NodeId a) {
  Node n;
  n.op = Op::Cubic;
  n.inputs = {a};
  n.value = value(a);
  for (double& x : n.value.data) x = x * x * x;
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::square_norm(NodeId a) {
  Node n;
  n.op = Op::SquareNorm;
  n.inputs = {a};
  double s = 0.0;
  for (double x : value(a).data) s += x * x;
  n.value = Array::scalar(s);
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::sum(NodeId a) {
  Node n;
  n.op = Op::Sum;
  n.inputs = {a};
  double s = 0.0;
  for (double x : value(a).data) s += x;
  n.value = Array::scalar(s);
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

std::size_t Tape::conv1d_output_len(std::size_t len, std::size_t kernel, std::size_t padding,
                                    std::size_t stride) {
  if (stride == 0 || len + 2 * padding < kernel) return 0;
  return (len + 2 * padding - kernel) / stride + 1;
}

Tape::NodeId Tape::conv1d(NodeId x, NodeId w, std::size_t padding, std::size_t stride) {
  const Array& vx = value(x);
  const Array& vw = value(w);
  if (vx.rank() != 3 || vw.rank() != 3 || vx.dim(1) != vw.dim(1)) shape_fail("conv1d", vx, vw);
  const std::size_t B = vx.dim(0), Ci = vx.dim(1), L = vx.dim(2);
  const std::size_t Co = vw.dim(0), K = vw.dim(2);
  const std::size_t Lo = conv1d_output_len(L, K, padding, stride);
  if (Lo == 0) shape_fail("conv1d", vx, vw);

  // im2col: rows are (sample, output position), cols are (in-channel, tap)
  Array col({B * Lo, Ci * K});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t lo = 0; lo < Lo; ++lo) {
      double* row = col.data.data() + (b * Lo + lo) * Ci * K;
      for (std::size_t ci = 0; ci < Ci; ++ci)
        for (std::size_t k = 0; k < K; ++k) {
          const long li = static_cast<long>(lo * stride + k) - static_cast<long>(padding);
          row[ci * K + k] =
              (li >= 0 && li < static_cast<long>(L)) ? vx.data[(b * Ci + ci) * L + li] : 0.0;
        }
    }
  // weight as (Ci*K, Co)
  Array wmat({Ci * K, Co});
  for (std::size_t co = 0; co < Co; ++co)
    for (std::size_t ci = 0; ci < Ci; ++ci)
      for (std::size_t k = 0; k < K; ++k) wmat.at(ci * K + k, co) = vw.data[(co * Ci + ci) * K + k];

  Array outmat({B * Lo, Co});
  {
    CMatMap mc(col.data.data(), static_cast<Eigen::Index>(B * Lo),
               static_cast<Eigen::Index>(Ci * K));
    CMatMap mw(wmat.data.data(), static_cast<Eigen::Index>(Ci * K), static_cast<Eigen::Index>(Co));
    MatMap mo(outmat.data.data(), static_cast<Eigen::Index>(B * Lo), static_cast<Eigen::Index>(Co));
    mo.noalias() = mc * mw;
  }
  Node n;
  n.op = Op::Conv1d;
  n.inputs = {x, w};
  n.padding = padding;
  n.stride = stride;
  n.value = Array({B, Co, Lo});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t co = 0; co < Co; ++co)
      for (std::size_t lo = 0; lo < Lo; ++lo)
        n.value.data[(b * Co + co) * Lo + lo] = outmat.at(b * Lo + lo, co);
  n.requires_grad = node(x).requires_grad || node(w).requires_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::mse(NodeId pred, NodeId target) {
  const Array& vp = value(pred);
  const Array& vt = value(target);
  if (!vp.same_shape(vt)) shape_fail("mse", vp, vt);
  double s = 0.0;
  for (std::size_t i = 0; i < vp.size(); ++i) {
    const double d = vp.data[i] - vt.data[i];
    s += d * d;
  }
  Node n;
  n.op = Op::Mse;
  n.inputs = {pred, target};
  n.value = Array::scalar(s / static_cast<double>(vp.size()));
  n.requires_grad = node(pred).requires_grad || node(target).requires_grad;
  return push(std::move(n));
}

Array& Tape::grad_buf(NodeId id) {
  Array& g = grads_[id];
  if (g.data.empty()) g = Array::zeros(nodes_[id].value.shape);
  return g;
}

const Array& Tape::grad(NodeId id) const {
  if (id < grads_.size() && !grads_[id].data.empty()) return grads_[id];
  return empty_grad_;
}

void Tape::backward(NodeId loss) {
  if (value(loss).size() != 1)
    throw ShapeError("backward: loss must be scalar, got " + value(loss).shape_str());
  grads_.assign(nodes_.size(), Array{});
  if (empty_grad_.data.empty()) empty_grad_ = Array::zeros({1});
  grad_buf(loss).data[0] = 1.0;

  for (NodeId id = loss + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!n.requires_grad || grads_[id].data.empty()) continue;
    const Array& g = grads_[id];
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul: {
        const Array& va = value(n.inputs[0]);
        const Array& vb = value(n.inputs[1]);
        CMatMap mg(g.data.data(), static_cast<Eigen::Index>(va.rows()),
                   static_cast<Eigen::Index>(vb.cols()));
        if (node(n.inputs[0]).requires_grad) {
          CMatMap mb(vb.data.data(), static_cast<Eigen::Index>(vb.rows()),
                     static_cast<Eigen::Index>(vb.cols()));
          Array& ga = grad_buf(n.inputs[0]);
          MatMap mga(ga.data.data(), static_cast<Eigen::Index>(va.rows()),
                     static_cast<Eigen::Index>(va.cols()));
          mga.noalias() += mg * mb.transpose();
        }
        if (node(n.inputs[1]).requires_grad) {
          CMatMap ma(va.data.data(), static_cast<Eigen::Index>(va.rows()),
                     static_cast<Eigen::Index>(va.cols()));
          Array& gb = grad_buf(n.inputs[1]);
          MatMap mgb(gb.data.data(), static_cast<Eigen::Index>(vb.rows()),
                     static_cast<Eigen::Index>(vb.cols()));
          mgb.noalias() += ma.transpose() * mg;
        }
        break;
      }
      case Op::Add: {
        const Array& va = value(n.inputs[0]);
        const Array& vb = value(n.inputs[1]);
        if (node(n.inputs[0]).requires_grad) {
          Array& ga = grad_buf(n.inputs[0]);
          for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] += g.data[i];
        }
        if (node(n.inputs[1]).requires_grad) {
          Array& gb = grad_buf(n.inputs[1]);
          if (va.same_shape(vb)) {
            for (std::size_t i = 0; i < gb.size(); ++i) gb.data[i] += g.data[i];
          } else if (va.rank() == 2) {
            for (std::size_t r = 0; r < va.rows(); ++r)
              for (std::size_t c = 0; c < va.cols(); ++c) gb.data[c] += g.at(r, c);
          } else {
            const std::size_t L = va.dim(2);
            for (std::size_t bi = 0; bi < va.dim(0); ++bi)
              for (std::size_t c = 0; c < va.dim(1); ++c)
                for (std::size_t l = 0; l < L; ++l)
                  gb.data[c] += g.data[(bi * va.dim(1) + c) * L + l];
          }
        }
        break;
      }
      case Op::Mul: {
        const Array& va = value(n.inputs[0]);
        const Array& vb = value(n.inputs[1]);
        if (node(n.inputs[0]).requires_grad) {
          Array& ga = grad_buf(n.inputs[0]);
          for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] += g.data[i] * vb.data[i];
        }
        if (node(n.inputs[1]).requires_grad) {
          Array& gb = grad_buf(n.inputs[1]);
          for (std::size_t i = 0; i < gb.size(); ++i) gb.data[i] += g.data[i] * va.data[i];
        }
        break;
      }
      case Op::Scale: {
        Array& ga = grad_buf(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] += n.scalar * g.data[i];
        break;
      }
      case Op::Concat: {
        std::size_t off = 0;
        for (NodeId p : n.inputs) {
          const Array& vp = value(p);
          if (node(p).requires_grad) {
            Array& gp = grad_buf(p);
            if (vp.rank() == 1 || n.axis == 0) {
              const std::size_t base = vp.rank() == 1 ? off : off * vp.cols();
              for (std::size_t i = 0; i < vp.size(); ++i) gp.data[i] += g.data[base + i];
            } else {
              for (std::size_t r = 0; r < vp.rows(); ++r)
                for (std::size_t c = 0; c < vp.cols(); ++c)
                  gp.at(r, c) += g.data[r * n.value.cols() + off + c];
            }
          }
          off += vp.rank() == 1 ? vp.size() : vp.dim(n.axis);
        }
        break;
      }
      case Op::Slice: {
        const Array& va = value(n.inputs[0]);
        Array& ga = grad_buf(n.inputs[0]);
        if (va.rank() == 1) {
          for (std::size_t i = 0; i < n.len; ++i) ga.data[n.start + i] += g.data[i];
        } else if (n.axis == 0) {
          for (std::size_t i = 0; i < n.len * va.cols(); ++i)
            ga.data[n.start * va.cols() + i] += g.data[i];
        } else {
          for (std::size_t r = 0; r < va.rows(); ++r)
            for (std::size_t c = 0; c < n.len; ++c) ga.at(r, n.start + c) += g.data[r * n.len + c];
        }
        break;
      }
      case Op::Reshape: {
        Array& ga = grad_buf(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] += g.data[i];
        break;
      }
      case Op::Relu: {
        const Array& va = value(n.inputs[0]);
        Array& ga = grad_buf(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i)
          if (va.data[i] > 0.0) ga.data[i] += g.data[i];
        break;
      }
      case Op::Tanh: {
        Array& ga = grad_buf(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i)
          ga.data[i] += (1.0 - n.value.data[i] * n.value.data[i]) * g.data[i];
        break;
      }
      case Op::Cubic: {
        const Array& va = value(n.inputs[0]);
        Array& ga = grad_buf(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i)
          ga.data[i] += 3.0 * va.data[i] * va.data[i] * g.data[i];
        break;
      }
      case Op::SquareNorm: {
        const Array& va = value(n.inputs[0]);
        Array& ga = grad_buf(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] += 2.0 * va.data[i] * g.data[0];
        break;
      }
      case Op::Sum: {
        Array& ga = grad_buf(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] += g.data[0];
        break;
      }
      case Op::Conv1d: {
        const Array& vx = value(n.inputs[0]);
        const Array& vw = value(n.inputs[1]);
        const std::size_t B = vx.dim(0), Ci = vx.dim(1), L = vx.dim(2);
        const std::size_t Co = vw.dim(0), K = vw.dim(2), Lo = n.value.dim(2);
        // dOut as (B*Lo, Co)
        Array gmat({B * Lo, Co});
        for (std::size_t b = 0; b < B; ++b)
          for (std::size_t co = 0; co < Co; ++co)
            for (std::size_t lo = 0; lo < Lo; ++lo)
              gmat.at(b * Lo + lo, co) = g.data[(b * Co + co) * Lo + lo];
        // rebuild im2col of the forward input
        Array col({B * Lo, Ci * K});
        for (std::size_t b = 0; b < B; ++b)
          for (std::size_t lo = 0; lo < Lo; ++lo) {
            double* row = col.data.data() + (b * Lo + lo) * Ci * K;
            for (std::size_t ci = 0; ci < Ci; ++ci)
              for (std::size_t k = 0; k < K; ++k) {
                const long li =
                    static_cast<long>(lo * n.stride + k) - static_cast<long>(n.padding);
                row[ci * K + k] = (li >= 0 && li < static_cast<long>(L))
                                      ? vx.data[(b * Ci + ci) * L + li]
                                      : 0.0;
              }
          }
        if (node(n.inputs[1]).requires_grad) {
          Array gwmat({Ci * K, Co});
          CMatMap mc(col.data.data(), static_cast<Eigen::Index>(B * Lo),
                     static_cast<Eigen::Index>(Ci * K));
          CMatMap mg(gmat.data.data(), static_cast<Eigen::Index>(B * Lo),
                     static_cast<Eigen::Index>(Co));
          MatMap mgw(gwmat.data.data(), static_cast<Eigen::Index>(Ci * K),
                     static_cast<Eigen::Index>(Co));
          mgw.noalias() = mc.transpose() * mg;
          Array& gw = grad_buf(n.inputs[1]);
          for (std::size_t co = 0; co < Co; ++co)
            for (std::size_t ci = 0; ci < Ci; ++ci)
              for (std::size_t k = 0; k < K; ++k)
                gw.data[(co * Ci + ci) * K + k] += gwmat.at(ci * K + k, co);
        }
        if (node(n.inputs[0]).requires_grad) {
          Array wmat({Ci * K, Co});
          for (std::size_t co = 0; co < Co; ++co)
            for (std::size_t ci = 0; ci < Ci; ++ci)
              for (std::size_t k = 0; k < K; ++k)
                wmat.at(ci * K + k, co) = vw.data[(co * Ci + ci) * K + k];
          Array gcol({B * Lo, Ci * K});
          CMatMap mg(gmat.data.data(), static_cast<Eigen::Index>(B * Lo),
                     static_cast<Eigen::Index>(Co));
          CMatMap mw(wmat.data.data(), static_cast<Eigen::Index>(Ci * K),
                     static_cast<Eigen::Index>(Co));
          MatMap mgc(gcol.data.data(), static_cast<Eigen::Index>(B * Lo),
                     static_cast<Eigen::Index>(Ci * K));
          mgc.noalias() = mg * mw.transpose();
          // col2im scatter
          Array& gx = grad_buf(n.inputs[0]);
          for (std::size_t b = 0; b < B; ++b)
            for (std::size_t lo = 0; lo < Lo; ++lo) {
              const double* row = gcol.data.data() + (b * Lo + lo) * Ci * K;
              for (std::size_t ci = 0; ci < Ci; ++ci)
                for (std::size_t k = 0; k < K; ++k) {
                  const long li =
                      static_cast<long>(lo * n.stride + k) - static_cast<long>(n.padding);
                  if (li >= 0 && li < static_cast<long>(L))
                    gx.data[(b * Ci + ci) * L + li] += row[ci * K + k];
                }
            }
        }
        break;
      }
      case Op::Mse: {
        const Array& vp = value(n.inputs[0]);
        const Array& vt = value(n.inputs[1]);
        const double c = 2.0 * g.data[0] / static_cast<double>(vp.size());
        if (node(n.inputs[0]).requires_grad) {
          Array& gp = grad_buf(n.inputs[0]);
          for (std::size_t i = 0; i < gp.size(); ++i)
            gp.data[i] += c * (vp.data[i] - vt.data[i]);
        }
        if (node(n.inputs[1]).requires_grad) {
          Array& gt = grad_buf(n.inputs[1]);
          for (std::size_t i = 0; i < gt.size(); ++i)
            gt.data[i] -= c * (vp.data[i] - vt.data[i]);
        }
        break;
      }
    }
  }
}

}  // namespace swarmsid
