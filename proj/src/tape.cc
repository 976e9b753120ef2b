// Copyright 2026 The Coref Authors.
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

#include "coref/tape.h"

#include <algorithm>
#include <cmath>

#include "coref/errors.h"
#include "coref/param_store.h"

namespace coref {
namespace {

[[noreturn]] void ShapeFail(Op op, const std::string& detail) {
  throw ShapeError(std::string(OpName(op)) + ": " + detail);
}

void RequireSameShape(Op op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    ShapeFail(op, a.ShapeString() + " vs " + b.ShapeString());
  }
}

void RequireColumn(Op op, const Tensor& a) {
  if (a.cols() != 1) ShapeFail(op, "expected a column vector, got " + a.ShapeString());
}

double SigmoidValue(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view OpName(Op op) {
  switch (op) {
    case Op::kConstant: return "constant";
    case Op::kLeaf: return "leaf";
    case Op::kParam: return "param";
    case Op::kMatMul: return "matmul";
    case Op::kTranspose: return "transpose";
    case Op::kAdd: return "add";
    case Op::kAddBias: return "add_bias";
    case Op::kSub: return "sub";
    case Op::kMul: return "elementwise_mul";
    case Op::kScale: return "scale";
    case Op::kConcatCols: return "concat_cols";
    case Op::kConcatRows: return "concat_rows";
    case Op::kSliceCols: return "slice_cols";
    case Op::kGatherRows: return "gather_rows";
    case Op::kGatherEntries: return "gather_entries";
    case Op::kSigmoid: return "sigmoid";
    case Op::kRelu: return "relu";
    case Op::kTanh: return "tanh";
    case Op::kSegmentSoftmax: return "segment_softmax";
    case Op::kSegmentSum: return "segment_sum";
    case Op::kSegmentWeightedSum: return "segment_weighted_sum";
    case Op::kSum: return "sum";
    case Op::kLog: return "scalar_log";
  }
  return "unknown";
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || static_cast<size_t>(v.id) >= nodes_.size()) {
    throw Error("invalid tape variable " + std::to_string(v.id));
  }
  return nodes_[v.id];
}

Var Tape::Push(Op op, std::vector<int32_t> inputs, Tensor value,
               std::vector<int32_t> index, double scalar) {
  if (!value.AllFinite()) {
    throw NumericError(std::string(OpName(op)) + " produced a non-finite value");
  }
  Node n;
  n.op = op;
  n.requires_grad = op == Op::kLeaf || op == Op::kParam;
  for (int32_t in : inputs) n.requires_grad |= nodes_[in].requires_grad;
  n.inputs = std::move(inputs);
  n.index = std::move(index);
  n.scalar = scalar;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  backward_done_ = false;
  return Var{static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::Constant(Tensor value) { return Push(Op::kConstant, {}, std::move(value)); }

Var Tape::Leaf(Tensor value) { return Push(Op::kLeaf, {}, std::move(value)); }

Var Tape::Param(const ParamStore& store, const std::string& name) {
  auto it = params_.find(name);
  if (it != params_.end()) return it->second;
  Var v = Push(Op::kParam, {}, store.Get(name));
  params_.emplace(name, v);
  return v;
}

Var Tape::MatMul(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  if (x.cols() != y.rows()) {
    ShapeFail(Op::kMatMul, x.ShapeString() + " x " + y.ShapeString());
  }
  return Push(Op::kMatMul, {a.id, b.id}, coref::MatMul(x, y));
}

Var Tape::Transpose(Var a) {
  return Push(Op::kTranspose, {a.id}, coref::Transpose(node(a).value));
}

Var Tape::Add(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  RequireSameShape(Op::kAdd, x, y);
  Tensor out = x;
  out.AddInPlace(y);
  return Push(Op::kAdd, {a.id, b.id}, std::move(out));
}

Var Tape::AddBias(Var a, Var bias) {
  const Tensor& x = node(a).value;
  const Tensor& b = node(bias).value;
  if (b.rows() != 1 || b.cols() != x.cols()) {
    ShapeFail(Op::kAddBias, x.ShapeString() + " + bias " + b.ShapeString());
  }
  Tensor out = x;
  for (size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (size_t c = 0; c < row.size(); ++c) row[c] += b[c];
  }
  return Push(Op::kAddBias, {a.id, bias.id}, std::move(out));
}

Var Tape::Sub(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  RequireSameShape(Op::kSub, x, y);
  Tensor out = x;
  for (size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  return Push(Op::kSub, {a.id, b.id}, std::move(out));
}

Var Tape::Mul(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  RequireSameShape(Op::kMul, x, y);
  Tensor out = x;
  for (size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return Push(Op::kMul, {a.id, b.id}, std::move(out));
}

Var Tape::Scale(Var a, double factor) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v *= factor;
  return Push(Op::kScale, {a.id}, std::move(out), {}, factor);
}

Var Tape::ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) ShapeFail(Op::kConcatCols, "no inputs");
  const size_t rows = node(parts[0]).value.rows();
  size_t cols = 0;
  std::vector<int32_t> ids;
  for (Var p : parts) {
    const Tensor& t = node(p).value;
    if (t.rows() != rows) {
      ShapeFail(Op::kConcatCols, "row mismatch " + node(parts[0]).value.ShapeString() +
                                     " vs " + t.ShapeString());
    }
    cols += t.cols();
    ids.push_back(p.id);
  }
  Tensor out(rows, cols);
  size_t offset = 0;
  for (Var p : parts) {
    const Tensor& t = node(p).value;
    for (size_t r = 0; r < rows; ++r) {
      std::copy(t.row(r).begin(), t.row(r).end(), out.row(r).begin() + offset);
    }
    offset += t.cols();
  }
  return Push(Op::kConcatCols, std::move(ids), std::move(out));
}

Var Tape::ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) ShapeFail(Op::kConcatRows, "no inputs");
  const size_t cols = node(parts[0]).value.cols();
  std::vector<double> data;
  std::vector<int32_t> ids;
  size_t rows = 0;
  for (Var p : parts) {
    const Tensor& t = node(p).value;
    if (t.cols() != cols) {
      ShapeFail(Op::kConcatRows, "column mismatch " +
                                     node(parts[0]).value.ShapeString() + " vs " +
                                     t.ShapeString());
    }
    data.insert(data.end(), t.data().begin(), t.data().end());
    rows += t.rows();
    ids.push_back(p.id);
  }
  return Push(Op::kConcatRows, std::move(ids), Tensor(rows, cols, std::move(data)));
}

Var Tape::SliceCols(Var a, size_t begin, size_t end) {
  const Tensor& x = node(a).value;
  if (begin > end || end > x.cols()) {
    ShapeFail(Op::kSliceCols, "columns [" + std::to_string(begin) + ", " +
                                  std::to_string(end) + ") of " + x.ShapeString());
  }
  Tensor out(x.rows(), end - begin);
  for (size_t r = 0; r < x.rows(); ++r) {
    std::copy(x.row(r).begin() + begin, x.row(r).begin() + end, out.row(r).begin());
  }
  return Push(Op::kSliceCols, {a.id}, std::move(out), {},
              static_cast<double>(begin));
}

Var Tape::GatherRows(Var a, std::vector<int32_t> rows) {
  const Tensor& x = node(a).value;
  Tensor out(rows.size(), x.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || static_cast<size_t>(rows[i]) >= x.rows()) {
      ShapeFail(Op::kGatherRows, "row " + std::to_string(rows[i]) + " out of range for " +
                                     x.ShapeString());
    }
    std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), out.row(i).begin());
  }
  return Push(Op::kGatherRows, {a.id}, std::move(out), std::move(rows));
}

Var Tape::GatherEntries(Var a, std::vector<int32_t> flat_indices) {
  const Tensor& x = node(a).value;
  Tensor out(flat_indices.size(), 1);
  for (size_t i = 0; i < flat_indices.size(); ++i) {
    if (flat_indices[i] < 0 || static_cast<size_t>(flat_indices[i]) >= x.size()) {
      ShapeFail(Op::kGatherEntries, "index " + std::to_string(flat_indices[i]) +
                                        " out of range for " + x.ShapeString());
    }
    out[i] = x[flat_indices[i]];
  }
  return Push(Op::kGatherEntries, {a.id}, std::move(out), std::move(flat_indices));
}

Var Tape::Sigmoid(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = SigmoidValue(v);
  return Push(Op::kSigmoid, {a.id}, std::move(out));
}

Var Tape::Relu(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return Push(Op::kRelu, {a.id}, std::move(out));
}

Var Tape::Tanh(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) v = std::tanh(v);
  return Push(Op::kTanh, {a.id}, std::move(out));
}

void Tape::CheckOffsets(Op op, const Offsets& offsets, size_t rows) const {
  if (offsets.empty() || offsets.front() != 0 ||
      static_cast<size_t>(offsets.back()) != rows) {
    ShapeFail(op, "segment offsets do not cover " + std::to_string(rows) + " rows");
  }
  for (size_t s = 1; s < offsets.size(); ++s) {
    if (offsets[s] < offsets[s - 1]) ShapeFail(op, "segment offsets decrease");
  }
}

Var Tape::SegmentSoftmax(Var logits, Offsets offsets, bool fixed_zero_logit) {
  const Tensor& x = node(logits).value;
  RequireColumn(Op::kSegmentSoftmax, x);
  CheckOffsets(Op::kSegmentSoftmax, offsets, x.rows());
  const size_t segments = offsets.size() - 1;
  const size_t extra = fixed_zero_logit ? 1 : 0;
  Tensor out(x.rows() + extra * segments, 1);
  size_t o = 0;
  for (size_t s = 0; s < segments; ++s) {
    const size_t begin = offsets[s], end = offsets[s + 1];
    double max_logit = fixed_zero_logit ? 0.0 : -INFINITY;
    for (size_t k = begin; k < end; ++k) max_logit = std::max(max_logit, x[k]);
    double total = fixed_zero_logit ? std::exp(-max_logit) : 0.0;
    for (size_t k = begin; k < end; ++k) total += std::exp(x[k] - max_logit);
    if (fixed_zero_logit) out[o++] = std::exp(-max_logit) / total;
    for (size_t k = begin; k < end; ++k) out[o++] = std::exp(x[k] - max_logit) / total;
  }
  return Push(Op::kSegmentSoftmax, {logits.id}, std::move(out), std::move(offsets),
              fixed_zero_logit ? 1.0 : 0.0);
}

Var Tape::SoftmaxWithFixedZeroLogit(Var logits) {
  const int32_t k = static_cast<int32_t>(node(logits).value.rows());
  return SegmentSoftmax(logits, Offsets{0, k}, /*fixed_zero_logit=*/true);
}

Var Tape::SegmentSum(Var x, Offsets offsets) {
  const Tensor& v = node(x).value;
  RequireColumn(Op::kSegmentSum, v);
  CheckOffsets(Op::kSegmentSum, offsets, v.rows());
  Tensor out(offsets.size() - 1, 1);
  for (size_t s = 0; s + 1 < offsets.size(); ++s) {
    for (int32_t k = offsets[s]; k < offsets[s + 1]; ++k) out[s] += v[k];
  }
  return Push(Op::kSegmentSum, {x.id}, std::move(out), std::move(offsets));
}

Var Tape::SegmentWeightedSum(Var weights, Var values, Offsets offsets) {
  const Tensor& w = node(weights).value;
  const Tensor& v = node(values).value;
  RequireColumn(Op::kSegmentWeightedSum, w);
  if (w.rows() != v.rows()) {
    ShapeFail(Op::kSegmentWeightedSum,
              "weights " + w.ShapeString() + " vs values " + v.ShapeString());
  }
  CheckOffsets(Op::kSegmentWeightedSum, offsets, v.rows());
  Tensor out(offsets.size() - 1, v.cols());
  for (size_t s = 0; s + 1 < offsets.size(); ++s) {
    auto dst = out.row(s);
    for (int32_t k = offsets[s]; k < offsets[s + 1]; ++k) {
      auto src = v.row(k);
      for (size_t c = 0; c < dst.size(); ++c) dst[c] += w[k] * src[c];
    }
  }
  return Push(Op::kSegmentWeightedSum, {weights.id, values.id}, std::move(out),
              std::move(offsets));
}

Var Tape::Sum(Var a) {
  double total = 0.0;
  for (double v : node(a).value.data()) total += v;
  return Push(Op::kSum, {a.id}, Tensor::Scalar(total));
}

Var Tape::Log(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data()) {
    if (!(v > 0.0)) throw NumericError("scalar_log of non-positive value");
    v = std::log(v);
  }
  return Push(Op::kLog, {a.id}, std::move(out));
}

const Tensor& Tape::adjoint(Var v) const {
  const Node& n = node(v);
  if (!backward_done_) throw Error("adjoint requested before Backward");
  if (n.adjoint.rows() != n.value.rows() || n.adjoint.cols() != n.value.cols()) {
    throw Error("node " + std::to_string(v.id) + " (" + std::string(OpName(n.op)) +
                ") has no adjoint");
  }
  return n.adjoint;
}

Tensor& Tape::MutableAdjoint(int32_t id) {
  Node& n = nodes_[id];
  if (n.adjoint.rows() != n.value.rows() || n.adjoint.cols() != n.value.cols()) {
    n.adjoint = Tensor(n.value.rows(), n.value.cols());
  }
  return n.adjoint;
}

void Tape::Backward(Var loss) {
  const Node& root = node(loss);
  if (root.value.rows() != 1 || root.value.cols() != 1) {
    throw ShapeError("backward: loss must be scalar, got " + root.value.ShapeString());
  }
  for (Node& n : nodes_) {
    n.adjoint = n.requires_grad ? Tensor(n.value.rows(), n.value.cols()) : Tensor();
  }
  backward_done_ = true;
  if (!root.requires_grad) return;
  nodes_[loss.id].adjoint[0] = 1.0;
  for (int32_t id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[id];
    if (!n.requires_grad || n.inputs.empty()) continue;
    Propagate(n);
  }
}

void Tape::Propagate(const Node& n) {
  const Tensor& g = n.adjoint;
  auto wants = [&](size_t i) { return nodes_[n.inputs[i]].requires_grad; };
  auto in_value = [&](size_t i) -> const Tensor& { return nodes_[n.inputs[i]].value; };

  switch (n.op) {
    case Op::kConstant:
    case Op::kLeaf:
    case Op::kParam:
      break;
    case Op::kMatMul: {
      const Tensor& a = in_value(0);
      const Tensor& b = in_value(1);
      if (wants(0)) MutableAdjoint(n.inputs[0]).AddInPlace(coref::MatMul(g, coref::Transpose(b)));
      if (wants(1)) MutableAdjoint(n.inputs[1]).AddInPlace(coref::MatMul(coref::Transpose(a), g));
      break;
    }
    case Op::kTranspose:
      if (wants(0)) MutableAdjoint(n.inputs[0]).AddInPlace(coref::Transpose(g));
      break;
    case Op::kAdd:
      if (wants(0)) MutableAdjoint(n.inputs[0]).AddInPlace(g);
      if (wants(1)) MutableAdjoint(n.inputs[1]).AddInPlace(g);
      break;
    case Op::kAddBias:
      if (wants(0)) MutableAdjoint(n.inputs[0]).AddInPlace(g);
      if (wants(1)) {
        Tensor& db = MutableAdjoint(n.inputs[1]);
        for (size_t r = 0; r < g.rows(); ++r) {
          auto row = g.row(r);
          for (size_t c = 0; c < row.size(); ++c) db[c] += row[c];
        }
      }
      break;
    case Op::kSub:
      if (wants(0)) MutableAdjoint(n.inputs[0]).AddInPlace(g);
      if (wants(1)) {
        Tensor& d = MutableAdjoint(n.inputs[1]);
        for (size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
      }
      break;
    case Op::kMul: {
      const Tensor& a = in_value(0);
      const Tensor& b = in_value(1);
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (size_t i = 0; i < g.size(); ++i) d[i] += g[i] * b[i];
      }
      if (wants(1)) {
        Tensor& d = MutableAdjoint(n.inputs[1]);
        for (size_t i = 0; i < g.size(); ++i) d[i] += g[i] * a[i];
      }
      break;
    }
    case Op::kScale:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (size_t i = 0; i < g.size(); ++i) d[i] += n.scalar * g[i];
      }
      break;
    case Op::kConcatCols: {
      size_t offset = 0;
      for (size_t i = 0; i < n.inputs.size(); ++i) {
        const size_t cols = in_value(i).cols();
        if (wants(i)) {
          Tensor& d = MutableAdjoint(n.inputs[i]);
          for (size_t r = 0; r < g.rows(); ++r) {
            auto src = g.row(r);
            auto dst = d.row(r);
            for (size_t c = 0; c < cols; ++c) dst[c] += src[offset + c];
          }
        }
        offset += cols;
      }
      break;
    }
    case Op::kConcatRows: {
      size_t offset = 0;
      for (size_t i = 0; i < n.inputs.size(); ++i) {
        const size_t count = in_value(i).size();
        if (wants(i)) {
          Tensor& d = MutableAdjoint(n.inputs[i]);
          for (size_t k = 0; k < count; ++k) d[k] += g[offset + k];
        }
        offset += count;
      }
      break;
    }
    case Op::kSliceCols:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        const size_t begin = static_cast<size_t>(n.scalar);
        for (size_t r = 0; r < g.rows(); ++r) {
          auto src = g.row(r);
          auto dst = d.row(r);
          for (size_t c = 0; c < src.size(); ++c) dst[begin + c] += src[c];
        }
      }
      break;
    case Op::kGatherRows:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (size_t i = 0; i < n.index.size(); ++i) {
          auto src = g.row(i);
          auto dst = d.row(n.index[i]);
          for (size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
      }
      break;
    case Op::kGatherEntries:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (size_t i = 0; i < n.index.size(); ++i) d[n.index[i]] += g[i];
      }
      break;
    case Op::kSigmoid:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (size_t i = 0; i < g.size(); ++i) {
          const double y = n.value[i];
          d[i] += g[i] * y * (1.0 - y);
        }
      }
      break;
    case Op::kRelu:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        const Tensor& x = in_value(0);
        for (size_t i = 0; i < g.size(); ++i) {
          if (x[i] > 0.0) d[i] += g[i];
        }
      }
      break;
    case Op::kTanh:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (size_t i = 0; i < g.size(); ++i) {
          const double y = n.value[i];
          d[i] += g[i] * (1.0 - y * y);
        }
      }
      break;
    case Op::kSegmentSoftmax:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        const size_t extra = n.scalar != 0.0 ? 1 : 0;
        size_t o = 0;
        for (size_t s = 0; s + 1 < n.index.size(); ++s) {
          const size_t begin = n.index[s], end = n.index[s + 1];
          const size_t len = end - begin + extra;
          double dot = 0.0;
          for (size_t k = 0; k < len; ++k) dot += n.value[o + k] * g[o + k];
          for (size_t k = extra; k < len; ++k) {
            d[begin + k - extra] += n.value[o + k] * (g[o + k] - dot);
          }
          o += len;
        }
      }
      break;
    case Op::kSegmentSum:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (size_t s = 0; s + 1 < n.index.size(); ++s) {
          for (int32_t k = n.index[s]; k < n.index[s + 1]; ++k) d[k] += g[s];
        }
      }
      break;
    case Op::kSegmentWeightedSum: {
      const Tensor& w = in_value(0);
      const Tensor& v = in_value(1);
      Tensor* dw = wants(0) ? &MutableAdjoint(n.inputs[0]) : nullptr;
      Tensor* dv = wants(1) ? &MutableAdjoint(n.inputs[1]) : nullptr;
      for (size_t s = 0; s + 1 < n.index.size(); ++s) {
        auto gs = g.row(s);
        for (int32_t k = n.index[s]; k < n.index[s + 1]; ++k) {
          auto vk = v.row(k);
          if (dw) {
            double dot = 0.0;
            for (size_t c = 0; c < gs.size(); ++c) dot += gs[c] * vk[c];
            (*dw)[k] += dot;
          }
          if (dv) {
            auto dvk = dv->row(k);
            for (size_t c = 0; c < gs.size(); ++c) dvk[c] += w[k] * gs[c];
          }
        }
      }
      break;
    }
    case Op::kSum:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        for (double& v : d.data()) v += g[0];
      }
      break;
    case Op::kLog:
      if (wants(0)) {
        Tensor& d = MutableAdjoint(n.inputs[0]);
        const Tensor& x = in_value(0);
        for (size_t i = 0; i < g.size(); ++i) d[i] += g[i] / x[i];
      }
      break;
  }
}

std::map<std::string, Tensor> Tape::ParamGradients() const {
  if (!backward_done_) throw Error("ParamGradients requested before Backward");
  std::map<std::string, Tensor> grads;
  for (const auto& [name, v] : params_) grads.emplace(name, nodes_[v.id].adjoint);
  return grads;
}

}  // namespace coref
