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

#ifndef COREF_TAPE_H_
#define COREF_TAPE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coref/tensor.h"

namespace coref {

class ParamStore;

// Handle to a value recorded on a Tape.
struct Var {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

enum class Op {
  kConstant,
  kLeaf,
  kParam,
  kMatMul,
  kTranspose,
  kAdd,
  kAddBias,
  kSub,
  kMul,
  kScale,
  kConcatCols,
  kConcatRows,
  kSliceCols,
  kGatherRows,
  kGatherEntries,
  kSigmoid,
  kRelu,
  kTanh,
  kSegmentSoftmax,
  kSegmentSum,
  kSegmentWeightedSum,
  kSum,
  kLog,
};

std::string_view OpName(Op op);

// Segment boundaries over the rows of a column vector: segment s covers rows
// [offsets[s], offsets[s+1]). offsets.front() must be 0.
using Offsets = std::vector<int32_t>;

// Records primitive operations with eagerly computed values and replays them
// in reverse to accumulate adjoints. Values are checked for finiteness as
// they are produced.
//
// A Tape is single-threaded. Distinct tapes may read the same ParamStore
// concurrently.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves. Constants receive no adjoint; Leaf and Param nodes do.
  Var Constant(Tensor value);
  Var Leaf(Tensor value);
  // Binds a named parameter. Repeated calls with the same name return the
  // same node so gradients accumulate in one place.
  Var Param(const ParamStore& store, const std::string& name);

  Var MatMul(Var a, Var b);
  Var Transpose(Var a);
  Var Add(Var a, Var b);
  // a is m x n, bias is 1 x n; bias is added to every row.
  Var AddBias(Var a, Var bias);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double factor);
  Var ConcatCols(std::span<const Var> parts);
  Var ConcatRows(std::span<const Var> parts);
  Var SliceCols(Var a, size_t begin, size_t end);
  Var GatherRows(Var a, std::vector<int32_t> rows);
  // Picks entries by flat row-major index; result is a column vector.
  Var GatherEntries(Var a, std::vector<int32_t> flat_indices);
  Var Sigmoid(Var a);
  Var Relu(Var a);
  Var Tanh(Var a);

  // Softmax within each segment of the column vector `logits`. With
  // `fixed_zero_logit`, every segment gains a leading output slot whose logit
  // is exactly 0 and which has no input (and so no gradient path); a segment
  // of k logits yields k + 1 probabilities and the output has
  // rows(logits) + segments rows.
  Var SegmentSoftmax(Var logits, Offsets offsets, bool fixed_zero_logit);
  // k x 1 logits -> (k + 1) x 1 probabilities, slot 0 being the fixed zero.
  Var SoftmaxWithFixedZeroLogit(Var logits);
  // Column vector n x 1 -> segments x 1.
  Var SegmentSum(Var x, Offsets offsets);
  // out[s] = sum over rows k of segment s of weights[k] * values[k, :].
  Var SegmentWeightedSum(Var weights, Var values, Offsets offsets);
  Var Sum(Var a);
  Var Log(Var a);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  // Valid after Backward for nodes downstream of a Leaf or Param; throws for
  // constants and their pure functions.
  const Tensor& adjoint(Var v) const;
  Op op(Var v) const { return nodes_.at(v.id).op; }
  size_t size() const { return nodes_.size(); }

  // Accumulates d(loss)/d(node) for every node that depends on a Leaf or
  // Param. `loss` must be 1 x 1.
  void Backward(Var loss);

  // Gradients of bound parameters by name, after Backward.
  std::map<std::string, Tensor> ParamGradients() const;
  const std::unordered_map<std::string, Var>& params() const { return params_; }

 private:
  struct Node {
    Op op;
    std::vector<int32_t> inputs;
    std::vector<int32_t> index;  // gather indices or segment offsets
    double scalar = 0.0;         // scale factor, slice begin, softmax flag
    bool requires_grad = false;
    Tensor value;
    Tensor adjoint;
  };

  Var Push(Op op, std::vector<int32_t> inputs, Tensor value,
           std::vector<int32_t> index = {}, double scalar = 0.0);
  const Node& node(Var v) const;
  void CheckOffsets(Op op, const Offsets& offsets, size_t rows) const;
  void Propagate(const Node& n);
  Tensor& MutableAdjoint(int32_t id);

  std::vector<Node> nodes_;
  std::unordered_map<std::string, Var> params_;
  bool backward_done_ = false;
};

}  // namespace coref

#endif  // COREF_TAPE_H_
